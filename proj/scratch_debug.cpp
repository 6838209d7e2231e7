// Probe v7: [Sol] = G-image span of fully-coclosed tc sources (clean marches)
// augmented with directly-solved partner fields for the dying (k+1)-classes;
// van = left kernel of the evaluation pairing, cross-checked against the
// staying δd-image and the gram nullspace decomposition.
#include <cstdio>
#include <ctime>
#include <map>
#include <string>
#include <vector>

#include <gaugeloc/cohomology.hpp>
#include <gaugeloc/presets.hpp>
#include <gaugeloc/propagator.hpp>

using namespace gaugeloc;

static std::vector<int> iota_list(int n) {
    std::vector<int> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i;
    return v;
}

static std::vector<int> complement_of(int n, const std::vector<int>& in) {
    std::vector<bool> mask(static_cast<size_t>(n), false);
    for (int g : in) mask[static_cast<size_t>(g)] = true;
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (!mask[static_cast<size_t>(i)]) out.push_back(i);
    return out;
}

static SparseVec expandv(const SparseVec& v, const std::vector<int>& cells) {
    SparseVec out;
    for (const auto& [i, val] : v.terms) out.terms.emplace_back(cells[static_cast<size_t>(i)], val);
    return out;
}

static SparseVec compressv(const SparseVec& v, const std::vector<int>& cells) {
    std::map<int, int> pos;
    for (size_t i = 0; i < cells.size(); ++i) pos[cells[i]] = static_cast<int>(i);
    SparseVec out;
    for (const auto& [g, val] : v.terms) {
        auto it = pos.find(g);
        if (it == pos.end()) {
            std::printf("  !! compressv: value at cell %d outside world\n", g);
            continue;
        }
        out.terms.emplace_back(it->second, val);
    }
    return out;
}

static RationalMatrix cols_of(const Subspace& S) {
    RationalMatrix rowsm(S.dim(), S.ambient_dim);
    rowsm.row = S.basis;
    return transpose(rowsm);
}

static Cochain free_causal(const DAlembertOperator& op, const Cochain& f) {
    Cochain plus = detail::march(op, op.forward, op.box, f);
    Cochain minus = detail::apply_mirror(
        op, detail::march(op, op.backward, op.box_mirrored, detail::apply_mirror(op, f)));
    return Cochain{f.complex, f.degree, sv_sub(plus.values, minus.values)};
}

// Per spacetime cell of degree k: spatial part lies on an outer wall.
static std::vector<char> outer_flags(const SpacetimeComplex& X, int k) {
    int T = X.time.n;
    int sdim = X.comps[0].dim();
    std::vector<char> f;
    f.reserve(static_cast<size_t>(X.n_cells[static_cast<size_t>(k)]));
    if (k <= sdim) {
        std::vector<char> sl;
        for (const auto& comp : X.comps)
            for (uint64_t key : comp.cells[static_cast<size_t>(k)])
                sl.push_back(detail::on_outer_wall(comp, unpack_cell(key)) ? 1 : 0);
        for (int tv = 0; tv <= T; ++tv) f.insert(f.end(), sl.begin(), sl.end());
    }
    if (k >= 1) {
        std::vector<char> sl;
        for (const auto& comp : X.comps)
            for (uint64_t key : comp.cells[static_cast<size_t>(k) - 1])
                sl.push_back(detail::on_outer_wall(comp, unpack_cell(key)) ? 1 : 0);
        for (int te = 0; te < T; ++te) f.insert(f.end(), sl.begin(), sl.end());
    }
    return f;
}

int main() {
    const int k = 1;
    for (std::string name : {"CYL2", "MINK2", "TWOSTRIP", "ANN3", "PLANE3"}) {
        std::clock_t t0 = std::clock();
        auto c = preset_complex(name);
        const SpacetimeComplex& X = *c;
        int n0 = X.n_cells[static_cast<size_t>(k) - 1];
        int n1 = X.n_cells[static_cast<size_t>(k)];
        auto cc = allowed_cells(X, k, supp_c);
        auto cc2 = allowed_cells(X, k + 1, supp_c);
        auto tc1 = allowed_cells(X, k, supp_tc);

        RationalMatrix Dk = full_codifferential(X, k);
        RationalMatrix DD = mat_mul(full_codifferential(X, k + 1), X.d_full[static_cast<size_t>(k)]);

        Subspace Inv = kernel_basis(submatrix(Dk, iota_list(n0), cc));
        std::vector<Cochain> invco;
        for (const auto& b : Inv.basis) invco.push_back(make_cochain(c, k, expandv(b, cc)));

        DAlembertOperator op = build_dalembert(c, k);

        // Equation rows: k-cells whose whole neighborhood is interior, i.e.
        // away from the time ends, the outer walls and any hole frame.  These
        // are exactly the compact-support cells.
        const std::vector<int>& faithful = cc;
        auto faithful_mask = allowed_mask(X, k, supp_c);

        // gram on Inv via free marches
        std::vector<Cochain> GI;
        for (const auto& w : invco) GI.push_back(free_causal(op, w));
        RationalMatrix gram(Inv.dim(), Inv.dim());
        for (int i = 0; i < Inv.dim(); ++i)
            for (int j = 0; j < Inv.dim(); ++j) {
                Rat val = metric_pairing(invco[static_cast<size_t>(i)], GI[static_cast<size_t>(j)]);
                if (val != 0) gram.set(i, j, val);
            }
        bool antisym = true;
        for (int i = 0; i < Inv.dim() && antisym; ++i)
            for (int j = 0; j < Inv.dim(); ++j) {
                Rat aij = sv_get(gram.row[static_cast<size_t>(i)], j);
                Rat aji = sv_get(gram.row[static_cast<size_t>(j)], i);
                Rat sum = aij + aji;
                if (sum != 0) { antisym = false; break; }
            }
        Subspace nullG = kernel_basis(gram);
        RationalMatrix InvCols = cols_of(Inv);
        Subspace spanNull = image_basis(mat_mul(InvCols, cols_of(nullG)));

        // Dying (k+1)-classes and their evaluation functionals Δθ = δθ.
        auto Hc2 = cohomology(c, k + 1, supp_c, Flavor::d);
        auto Htc2 = cohomology(c, k + 1, supp_tc, Flavor::d);
        RationalMatrix R(Htc2.dim(), Hc2.dim());
        for (int j = 0; j < Hc2.dim(); ++j) {
            auto coords = Htc2.coordinates(Hc2.representatives[static_cast<size_t>(j)]);
            for (int i = 0; i < Htc2.dim(); ++i)
                if (coords[static_cast<size_t>(i)] != 0) R.set(i, j, coords[static_cast<size_t>(i)]);
        }
        Subspace dying = kernel_basis(R);

        std::vector<Cochain> thetas;
        for (const auto& z : dying.basis) {
            SparseVec theta_full;
            for (const auto& [j, val] : z.terms)
                theta_full =
                    sv_axpy(theta_full, val, Hc2.representatives[static_cast<size_t>(j)].values);
            thetas.push_back(make_cochain(c, k + 1, theta_full));
        }

        // Phase 1: G images of fully-coclosed tc sources, mod gauge.
        Subspace Kup = kernel_basis(submatrix(Dk, iota_list(n0), tc1));
        RationalMatrix gaugeT = transpose(X.d_full[static_cast<size_t>(k) - 1]);
        TrackedEchelon sol_te(n1);
        for (const auto& col : gaugeT.row) sol_te.insert(col);
        std::vector<Cochain> A;
        int bad_resid = 0;
        for (const auto& w : Kup.basis) {
            Cochain src = make_cochain(c, k, expandv(w, tc1));
            Cochain Gw = free_causal(op, src);
            if (!sol_te.insert(Gw.values)) continue;
            Cochain resid = apply_delta(apply_d(Gw));
            for (const auto& [g, val] : resid.values.terms)
                if (val != 0 && faithful_mask[static_cast<size_t>(g)]) ++bad_resid;
            A.push_back(Gw);
        }
        int s_march = static_cast<int>(A.size());

        // Discrete source quotient: coclosed tc sources modulo δd-images of tc
        // fields that stay supported inside the tc world.  Its dimension is
        // the window mirror of the abstract solution classification.
        std::vector<int> uend_k;
        for (int g = 0; g < n1; ++g)
            if (X.time_stratum[static_cast<size_t>(k)][static_cast<size_t>(g)]) uend_k.push_back(g);
        Subspace Kstay = kernel_basis(submatrix(DD, uend_k, tc1));
        Subspace Dstay =
            image_basis(mat_mul(submatrix(DD, iota_list(n1), tc1), cols_of(Kstay)));
        std::vector<SparseVec> kup_full;
        for (const auto& w : Kup.basis) kup_full.push_back(expandv(w, tc1));
        Subspace KupFull = span_of(n1, kup_full);
        bool dstay_in_kup = true;
        for (const auto& v : Dstay.basis)
            if (!KupFull.contains(v)) { dstay_in_kup = false; break; }
        int absdim = Kup.dim() - Dstay.dim();

        // Phase 2: one partner field per dying class, solved directly over the
        // time-compact world: δdA = 0 at every stencil-complete row, unit
        // pairing (θ_i, dA) against its own dying class, zero against the
        // others.  (θ_i, d·) is evaluated through the adjoint: the row at cell
        // g is (δθ_i)(g) times the metric weight of g.
        int nrows = static_cast<int>(faithful.size() + thetas.size());
        RationalMatrix S(nrows, n1);
        int r = 0;
        for (int g : faithful) S.row[static_cast<size_t>(r++)] = DD.row[static_cast<size_t>(g)];
        int norm_base = r;
        for (const auto& th : thetas) {
            Cochain dth = apply_delta(th);
            SparseVec rowv;
            for (const auto& [g, val] : dth.values.terms) {
                Cochain ug = make_cochain(c, k, sv_unit(g));
                Rat w = metric_pairing(ug, ug);
                Rat pv = val * w;
                if (pv != 0) sv_set(rowv, g, pv);
            }
            S.row[static_cast<size_t>(r++)] = rowv;
        }
        ColumnSolver partner_solver(submatrix(S, iota_list(nrows), tc1));
        int n_partner = 0, n_unsolvable = 0, partner_bad = 0;
        for (size_t i = 0; i < thetas.size(); ++i) {
            SparseVec rhs = sv_unit(norm_base + static_cast<int>(i));
            auto x = partner_solver.solve(rhs);
            if (!x) { ++n_unsolvable; continue; }
            Cochain Ai = make_cochain(c, k, expandv(*x, tc1));
            Cochain resid = apply_delta(apply_d(Ai));
            for (const auto& [g, val] : resid.values.terms)
                if (val != 0 && faithful_mask[static_cast<size_t>(g)]) ++partner_bad;
            if (sol_te.insert(Ai.values)) { A.push_back(Ai); ++n_partner; }
        }
        int s = static_cast<int>(A.size());

        // Evaluation pairing and its kernels.
        RationalMatrix P(Inv.dim(), s);
        for (int i = 0; i < Inv.dim(); ++i)
            for (int j = 0; j < s; ++j) {
                Rat val = metric_pairing(invco[static_cast<size_t>(i)], A[static_cast<size_t>(j)]);
                if (val != 0) P.set(i, j, val);
            }
        Subspace kerP = kernel_basis(transpose(P));
        int right_ker = kernel_basis(P).dim();
        int rankP = rank_of(P);
        Subspace spanKerP = image_basis(mat_mul(InvCols, cols_of(kerP)));

        // Radical witnesses: for each dying class, the invariant that
        // evaluates like A ↦ (θ_i, dA) on every constructed solution.  It is
        // determined mod kerP; it must be gram-null and must extend kerP to
        // exactly the gram nullspace.
        std::vector<Cochain> dAs;
        for (const auto& a : A) dAs.push_back(apply_d(a));
        ColumnSolver pt_solver(transpose(P));
        int rad_found = 0, rad_in_null = 0, rad_new = 0;
        TrackedEchelon rad_te(Inv.dim());
        for (const auto& b : kerP.basis) rad_te.insert(b);
        bool kerP_in_null = true;
        for (const auto& b : kerP.basis)
            if (!nullG.contains(b)) { kerP_in_null = false; break; }
        for (const auto& th : thetas) {
            SparseVec b;
            for (int j = 0; j < s; ++j) {
                Rat val = metric_pairing(th, dAs[static_cast<size_t>(j)]);
                if (val != 0) sv_set(b, j, val);
            }
            auto cvec = pt_solver.solve(b);
            if (!cvec) continue;
            ++rad_found;
            if (nullG.contains(*cvec)) ++rad_in_null;
            if (rad_te.insert(*cvec)) ++rad_new;
        }
        bool rad_span_eq = kerP_in_null && rad_in_null == static_cast<int>(thetas.size()) &&
                           rad_te.rank() == kerP.dim() + dying.dim() &&
                           rad_te.rank() == nullG.dim();

        auto span_eq = [](const Subspace& a, const Subspace& b) {
            if (a.dim() != b.dim()) return false;
            for (const auto& v : a.basis)
                if (!b.contains(v)) return false;
            return true;
        };
        auto span_in = [](const Subspace& a, const Subspace& b) {
            for (const auto& v : a.basis)
                if (!b.contains(v)) return false;
            return true;
        };

        // Van candidates: staying δd-images.
        auto out_cc = complement_of(n1, cc);
        auto staying_image = [&](const std::vector<int>& cols) {
            Subspace K = kernel_basis(submatrix(DD, out_cc, cols));
            return image_basis(mat_mul(submatrix(DD, cc, cols), cols_of(K)));
        };
        Subspace v1 = staying_image(cc);
        Subspace vT = staying_image(tc1);

        double dt = double(std::clock() - t0) / CLOCKS_PER_SEC;
        std::printf(
            "%s k=1: inv=%d | up=%d abs=%d(in:%d) s=%d(march %d + partner %d, unsolv %d) "
            "badresid=%d/%d | P: rank=%d kerP=%d rker=%d | gram: rank=%d null=%d antisym=%d "
            "[%.1fs]\n",
            name.c_str(), Inv.dim(), Kup.dim(), absdim, dstay_in_kup ? 1 : 0, s, s_march,
            n_partner, n_unsolvable, bad_resid, partner_bad, rankP, kerP.dim(), right_ker,
            Inv.dim() - nullG.dim(), nullG.dim(), antisym ? 1 : 0, dt);
        std::printf(
            "    dying=%d rad: found=%d in_null=%d new=%d span==null:%d | kerP-in-null:%d | "
            "van: v1=%d vT=%d | v1-in-kerP:%d vT==null:%d kerP-in-vT:%d\n",
            dying.dim(), rad_found, rad_in_null, rad_new, rad_span_eq ? 1 : 0,
            kerP_in_null ? 1 : 0, v1.dim(), vT.dim(),
            span_in(v1, spanKerP) ? 1 : 0, span_eq(vT, spanNull) ? 1 : 0,
            span_in(spanKerP, vT) ? 1 : 0);
        std::fflush(stdout);
    }
    return 0;
}
