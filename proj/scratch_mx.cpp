// Probe of the rewritten maxwell module against the validated model numbers.
#include <cstdio>
#include <map>
#include <string>

#include "gaugeloc/maxwell.hpp"
#include "gaugeloc/presets.hpp"

using namespace gaugeloc;

static std::map<std::string, ComplexPtr> complexes;
static std::map<std::string, MaxwellObservables> cache;

static ComplexPtr cx(const std::string& name) {
    auto it = complexes.find(name);
    if (it == complexes.end()) it = complexes.emplace(name, preset_complex(name)).first;
    return it->second;
}

static const MaxwellObservables& obs_of(const std::string& name) {
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, observables(cx(name), 1)).first;
    return it->second;
}

int main() {
    struct Expect { const char* name; int inv, sol, marched, partners, obsd, van, rad; };
    const Expect table[] = {
        {"CYL2", 33, 2, 2, 0, 2, 31, 0},
        {"MINK2", 168, 1, 0, 1, 1, 167, 1},
        {"TWOSTRIP", 16, 2, 0, 2, 2, 14, 2},
        {"ANN3", 85, 67, 66, 1, 67, 18, 1},
        {"PLANE3", 176, 72, 72, 0, 72, 104, 0},
    };
    for (const auto& e : table) {
        const MaxwellObservables& ob = obs_of(e.name);
        RadicalCheck rc = radical(ob);
        bool ok = ob.inv.dim() == e.inv && ob.solutions.dim() == e.sol &&
                  ob.solutions.n_images == e.marched && ob.solutions.n_partners == e.partners &&
                  ob.dim() == e.obsd && ob.van.dim() == e.van && rc.dim() == e.rad &&
                  rc.dying_dim == e.rad;
        std::printf("%-9s inv=%-4d sol=%d(%d+%d) obs=%-3d van=%-4d rad=%d dying=%d  %s\n",
                    e.name, ob.inv.dim(), ob.solutions.dim(), ob.solutions.n_images,
                    ob.solutions.n_partners, ob.dim(), ob.van.dim(), rc.dim(), rc.dying_dim,
                    ok ? "OK" : "MISMATCH");
        std::fflush(stdout);
    }

    // Lorenz gauge fixing: gauge-shift a solution, fix, classify residual rows.
    {
        const MaxwellObservables& ob = obs_of("CYL2");
        const auto& X = *ob.complex;
        const DAlembertOperator& op = ob.solutions.op;
        Cochain A = ob.solutions.representatives[0];
        // arbitrary gauge shift: χ0 = sum of a few 0-cochain units
        SparseVec chi0v;
        sv_set(chi0v, 5, Rat(3));
        sv_set(chi0v, 17, Rat(-2));
        sv_set(chi0v, 30, Rat(1, 2));
        Cochain chi0 = make_cochain(ob.complex, 0, chi0v);
        A.values = sv_add(A.values, apply_d(chi0).values);
        Cochain div_before = apply_delta(A);
        Cochain chi = lorenz_gauge_fix(op, A);
        Cochain fixed = A;
        fixed.values = sv_add(fixed.values, apply_d(chi).values);
        Cochain div_after = apply_delta(fixed);
        // classify residual rows by time level (degree k-1 = 0: u-only cells)
        int k1 = 0;
        int nu = X.sp_total[0];
        std::map<int, int> by_level;
        for (const auto& [gid, v] : div_after.values.terms)
            if (v != 0) by_level[gid / nu]++;
        std::printf("lorenz CYL2: |div before|=%zu, after by level:", div_before.values.terms.size());
        for (auto [lvl, cnt] : by_level) std::printf(" L%d:%d", lvl, cnt);
        std::printf(" (T=%d, k-1=%d)\n", X.T(), k1);
        std::fflush(stdout);
    }

    // Locality kernels.
    {
        auto twostrip = cx("TWOSTRIP");
        auto mink2 = cx("MINK2");
        Embedding e = make_embedding(twostrip, mink2,
                                     {ComponentMap{0, 0, {8}}, ComponentMap{0, 0, {28}}});
        LocalityKernel lk = locality_kernel(e, obs_of("TWOSTRIP"), obs_of("MINK2"));
        std::printf("locality TWOSTRIP->MINK2: ker=%d flux_ker=%d  %s\n", lk.kernel.dim(),
                    lk.flux_kernel_dim, lk.kernel.dim() == 1 ? "OK" : "MISMATCH");
        // generator component integrals: top-degree pairing per strip
        if (lk.kernel.dim() == 1) {
            const Cochain& gen = lk.generators[0];
            // integrate the density against each component's top cells: degree 1
            // on a 2d window: w-cells are per-component vertices... report the
            // pushforward pairing with each strip's flux class instead:
            std::printf("  generator support size=%zu\n", gen.values.terms.size());
        }
        std::fflush(stdout);
    }
    {
        auto ann3 = cx("ANN3");
        auto plane3 = cx("PLANE3");
        Embedding e = make_embedding(ann3, plane3, {ComponentMap{0, 0, {0, 0}}});
        LocalityKernel lk = locality_kernel(e, obs_of("ANN3"), obs_of("PLANE3"));
        std::printf("locality ANN3->PLANE3: ker=%d flux_ker=%d  %s\n", lk.kernel.dim(),
                    lk.flux_kernel_dim, lk.kernel.dim() == 1 ? "OK" : "MISMATCH");
        std::fflush(stdout);
    }
    {
        auto cyl2win = cx("CYL2WIN");
        auto cyl2 = cx("CYL2");
        Embedding e = make_embedding(cyl2win, cyl2, {ComponentMap{0, 1, {0}}});
        MaxwellObservables sub = observables(cyl2win, 1);
        LocalityKernel lk = locality_kernel(e, sub, obs_of("CYL2"));
        std::printf("locality CYL2WIN->CYL2: ker=%d  %s\n", lk.kernel.dim(),
                    lk.kernel.dim() == 0 ? "OK" : "MISMATCH");
        // gram preservation across the sub-window
        RationalMatrix map = observable_map(e, sub, obs_of("CYL2"));
        TimesliceReport ts = timeslice_check(e, 1);
        std::printf("timeslice CYL2WIN->CYL2: %d -> %d rank %d OK\n", ts.source_dim,
                    ts.target_dim, ts.rank);
        std::fflush(stdout);
    }

    // No-go: alive through TWOCYL, killed through MINK2; swapped finds nothing.
    {
        auto twostrip = cx("TWOSTRIP");
        auto mink2 = cx("MINK2");
        auto twocyl = cx("TWOCYL");
        Embedding to_mink = make_embedding(twostrip, mink2,
                                           {ComponentMap{0, 0, {8}}, ComponentMap{0, 0, {28}}});
        Embedding to_cyls = make_embedding(twostrip, twocyl,
                                           {ComponentMap{0, 0, {0}}, ComponentMap{1, 0, {0}}});
        NoGoWitness w = no_go_witness(to_cyls, to_mink, 1);
        std::printf("no-go alive=TWOCYL killed=MINK2: found=%d", w.found ? 1 : 0);
        if (w.found)
            std::printf(" partner=%d pairing=%s", w.partner, w.pairing.get_str().c_str());
        std::printf("\n");
        NoGoWitness sw = no_go_witness(to_mink, to_cyls, 1);
        std::printf("no-go swapped: found=%d  %s\n", sw.found ? 1 : 0,
                    (w.found && !sw.found) ? "OK" : "MISMATCH");
        std::fflush(stdout);
    }

    // Causality: two far-apart strips in MINK2.
    {
        auto strip = cx("STRIP");
        auto mink2 = cx("MINK2");
        Embedding f1 = make_embedding(strip, mink2, {ComponentMap{0, 0, {8}}});
        Embedding f2 = make_embedding(strip, mink2, {ComponentMap{0, 0, {28}}});
        CausalityReport cr = causality_check(f1, f2, 1);
        std::printf("causality MINK2 strips: %dx%d block zero OK\n", cr.dim1, cr.dim2);
        // and a deliberately close pair must refuse
        Embedding g2 = make_embedding(strip, mink2, {ComponentMap{0, 0, {13}}});
        try {
            causality_check(f1, g2, 1);
            std::printf("causality close pair: NO THROW (MISMATCH)\n");
        } catch (const ShadowsIntersect&) {
            std::printf("causality close pair: ShadowsIntersect OK\n");
        }
        std::fflush(stdout);
    }

    // Isotony: two nested holes in PLANE3.
    {
        auto anns = cx("ANNS");
        auto ann3 = cx("ANN3");
        auto plane3 = cx("PLANE3");
        Embedding e1 = make_embedding(anns, plane3, {ComponentMap{0, 0, {1, 1}}});
        Embedding e2 = make_embedding(ann3, plane3, {ComponentMap{0, 0, {0, 0}}});
        IsotonyReport ir = isotony_quotient({e1, e2}, 1);
        for (size_t i = 0; i < ir.regions.size(); ++i)
            std::printf("isotony region %zu: obs=%d ker=%d quot=%d\n", i, ir.regions[i].obs_dim,
                        ir.regions[i].kernel_dim, ir.regions[i].quotient_dim);
        std::printf("isotony ambient=%d\n", ir.ambient_dim);
        std::fflush(stdout);
    }
    std::printf("done\n");
    return 0;
}
