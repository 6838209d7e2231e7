#pragma once
// ---------------------------------------------------------------------------
// Linear gauge fields on a spacetime window
//
// A degree-k cochain A is a gauge potential: gauge shifts add dχ for an
// arbitrary (k-1)-cochain χ, the field strength is dA, and the equation of
// motion is the discrete wave equation δdA = 0. Everything here is exact
// rational arithmetic; every structural promise is verified at construction
// and a failure throws instead of returning a silently wrong object.
//
//   observables(c, k)     gauge-invariant linear functionals. A functional is
//                         a compactly supported density ω paired through the
//                         metric; invariance against every gauge shift forces
//                         δω = 0 with no support restriction on the test
//                         side. The causal pairing τ(ω, ω') = <ω, G ω'> is
//                         exactly antisymmetric; functionals that vanish on
//                         the whole solution space are quotiented away.
//
//   solution_space(c, k)  a basis of the wave equation's solutions reachable
//                         inside the window: causal-propagator images of
//                         time-compact coclosed sources, completed by
//                         directly solved partner fields for the flux sectors
//                         such sources cannot excite.
//
//   radical(ob)           the null directions of the pairing on observables,
//                         re-derived from the flux classes that die when
//                         compact support is relaxed in time, and the two
//                         routes checked against each other.
//
//   locality_kernel, no_go_witness, causality_check, timeslice_check,
//   isotony_quotient      audits along embeddings of windows: which
//                         observables become invisible in a larger region,
//                         why no assignment can be both locally faithful and
//                         degenerate-free, vanishing of the pairing across
//                         causally disconnected regions, reduction to a
//                         thinner time window, and the isotone net of
//                         faithful images inside a common complex.
//
// The window has artificial boundaries: the two time ends, and outer walls
// where a spatial axis is an interval. Cells on those strata carry one-sided
// stencils, so the wave equation is only imposed at cells whose whole
// neighbourhood is honest; those are exactly the compactly supported cells.
// A frame around a deleted region ("hole") is different: it is a genuine
// boundary of the geometry, and solutions are allowed nonzero flux residue
// there. Both kinds of cells still carry field data and observables pair
// against full solutions everywhere.
// ---------------------------------------------------------------------------

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "gaugeloc/cohomology.hpp"
#include "gaugeloc/propagator.hpp"

namespace gaugeloc {

namespace detail {

inline std::vector<int> all_rows(int n) {
    std::vector<int> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = i;
    return out;
}

inline std::vector<int> complement_rows(int n, const std::vector<int>& sorted_cells) {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(n) - sorted_cells.size());
    size_t p = 0;
    for (int i = 0; i < n; ++i) {
        if (p < sorted_cells.size() && sorted_cells[p] == i) { ++p; continue; }
        out.push_back(i);
    }
    return out;
}

// Re-index a vector over a sorted cell list to global cell ids.
inline SparseVec expand_support(const SparseVec& local, const std::vector<int>& cells) {
    SparseVec out;
    out.terms.reserve(local.terms.size());
    for (const auto& [i, v] : local.terms)
        out.terms.push_back({cells[static_cast<size_t>(i)], v});
    return out;
}

// Restrict a global vector to a sorted cell list. Entries outside the list
// must vanish; a violation means support leaked off the allowed cells.
inline SparseVec compress_support(const SparseVec& global, const std::vector<int>& cells,
                                  const SpacetimeComplex& X, int k, const std::string& what) {
    SparseVec out;
    for (const auto& [gid, v] : global.terms) {
        auto it = std::lower_bound(cells.begin(), cells.end(), gid);
        if (it == cells.end() || *it != gid)
            throw SupportLeak(what + ": support leaks onto " + describe_cell(X, k, gid));
        out.terms.push_back({static_cast<int>(it - cells.begin()), v});
    }
    return out;
}

inline RationalMatrix basis_columns(const Subspace& s) {
    RationalMatrix out(s.ambient_dim, s.dim());
    for (int j = 0; j < s.dim(); ++j)
        for (const auto& [r, v] : s.basis[static_cast<size_t>(j)].terms)
            out.set(r, j, v);
    return out;
}

// Causal propagator run window-intrinsically: unlike causal_propagator there
// is no margin or shadow gate, because the pairing built from it is audited
// directly against the solution space instead of against support estimates.
inline Cochain window_causal(const DAlembertOperator& op, const Cochain& f) {
    Cochain plus = march(op, op.forward, op.box, f);
    Cochain minus = apply_mirror(op, march(op, op.backward, op.box_mirrored, apply_mirror(op, f)));
    return Cochain{op.complex, op.degree, sv_sub(plus.values, minus.values)};
}

// Degrees 1..m-1 carry both a gauge leg (d from below) and a dynamical leg
// (δd from above); the causal marches need two seeding slices at each end.
inline void check_field_degree(const SpacetimeComplex& X, int k, const std::string& what) {
    if (k < 1 || k > X.m - 1)
        throw DegreeMismatch(what + ": gauge fields need degree 1.." + std::to_string(X.m - 1));
    if (X.T() < 4)
        throw ShadowOverflow(what + ": the causal propagator needs two seeding slices at each " +
                             "time end (T >= 4); enlarge the time window");
}

// Flux classes at degree k+1 that are nonzero with compact support but die
// when support is allowed to reach the walls: solved directly, these are the
// sectors no time-compact source can excite. Returns pristine compact
// representatives, one per dying class.
inline std::vector<Cochain> dying_flux_classes(const ComplexPtr& c, int k) {
    CohomologySpace cls_c = cohomology(c, k + 1, supp_c, Flavor::d);
    CohomologySpace cls_tc = cohomology(c, k + 1, supp_tc, Flavor::d);
    RationalMatrix relax(cls_tc.dim(), cls_c.dim());
    for (int j = 0; j < cls_c.dim(); ++j) {
        std::vector<Rat> col = cls_tc.coordinates(cls_c.representatives[static_cast<size_t>(j)]);
        for (int i = 0; i < cls_tc.dim(); ++i)
            if (col[static_cast<size_t>(i)] != 0) relax.set(i, j, col[static_cast<size_t>(i)]);
    }
    Subspace dying = kernel_basis(relax);
    std::vector<Cochain> out;
    out.reserve(static_cast<size_t>(dying.dim()));
    for (const SparseVec& z : dying.basis) {
        SparseVec acc;
        for (const auto& [j, coeff] : z.terms)
            acc = sv_axpy(acc, coeff, cls_c.representatives[static_cast<size_t>(j)].values);
        out.push_back(make_cochain(c, k + 1, std::move(acc)));
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Solutions
// ---------------------------------------------------------------------------

struct MaxwellSolutions {
    ComplexPtr complex;
    int degree = 0;
    DAlembertOperator op;                       // wave operator the fields satisfy

    std::vector<Cochain> sources;               // accepted time-compact coclosed sources
    std::vector<Cochain> representatives;       // causal images of the sources, then partners
    std::vector<Cochain> dying_representatives; // compact flux classes the sources cannot reach
    int n_images = 0;                           // representatives produced by marching
    int n_partners = 0;                         // representatives solved directly
    int source_quotient_dim = 0;                // coclosed sources mod images that stay compact

    int dim() const { return static_cast<int>(representatives.size()); }
};

// A basis of the window solutions of δdA = 0, modulo gauge.
//
// Phase one marches the causal propagator over a kernel basis of time-compact
// coclosed sources and keeps each image that is new modulo gauge shifts and
// earlier images. The number kept must equal the source count modulo sources
// whose wave image already stays time-compact — the classification of
// radiative sectors — and that equality is checked, not assumed.
//
// Phase two covers the flux sectors. For every compact flux class that dies
// under relaxed time support there is no time-compact source, so a field is
// solved for directly: wave equation rows at every compactly supported cell,
// plus one normalization row per dying class fixing its flux pairing.
inline MaxwellSolutions solution_space(const ComplexPtr& c, int k) {
    const SpacetimeComplex& X = *c;
    detail::check_field_degree(X, k, "solution_space");

    MaxwellSolutions out;
    out.complex = c;
    out.degree = k;
    out.op = build_dalembert(c, k);

    int n1 = X.n_cells[static_cast<size_t>(k)];
    int n0 = X.n_cells[static_cast<size_t>(k) - 1];
    std::vector<int> tc = allowed_cells(X, k, supp_tc);
    std::vector<int> cc = allowed_cells(X, k, supp_c);
    std::vector<bool> cmask = allowed_mask(X, k, supp_c);
    RationalMatrix div = full_codifferential(X, k);
    RationalMatrix wave = mat_mul(full_codifferential(X, k + 1), X.d_full[static_cast<size_t>(k)]);

    auto check_interior_residual = [&](const Cochain& A, const std::string& what) {
        SparseVec r = mat_vec(wave, A.values);
        for (const auto& [g, v] : r.terms) {
            (void)v;
            if (cmask[static_cast<size_t>(g)])
                throw Error(what + ": wave equation violated at interior cell " +
                            describe_cell(X, k, g));
        }
    };

    // -- phase one: causal images of time-compact coclosed sources ----------
    Subspace coclosed = kernel_basis(submatrix(div, detail::all_rows(n0), tc));

    // how many images must survive: quotient the sources by those whose wave
    // image already stays time-compact (their image is a gauge-trivial echo)
    std::vector<int> time_end;
    for (int g = 0; g < n1; ++g)
        if (X.time_stratum[static_cast<size_t>(k)][static_cast<size_t>(g)]) time_end.push_back(g);
    Subspace stay_tc_fields = kernel_basis(submatrix(wave, time_end, tc));
    Subspace stay_images = image_basis(
        mat_mul(submatrix(wave, detail::all_rows(n1), tc), detail::basis_columns(stay_tc_fields)));
    Subspace coclosed_full = span_of(n1, [&] {
        std::vector<SparseVec> gens;
        gens.reserve(coclosed.basis.size());
        for (const SparseVec& v : coclosed.basis) gens.push_back(detail::expand_support(v, tc));
        return gens;
    }());
    for (const SparseVec& b : stay_images.basis)
        if (!coclosed_full.contains(b))
            throw Error("solution_space: a time-compact wave image is not coclosed");
    out.source_quotient_dim = coclosed.dim() - stay_images.dim();

    // gauge shifts first, so an image is accepted only when new modulo gauge
    TrackedEchelon modulo_gauge(n1);
    RationalMatrix gauge_gens = transpose(X.d_full[static_cast<size_t>(k) - 1]);
    for (const SparseVec& g : gauge_gens.row) modulo_gauge.insert(g);

    for (const SparseVec& v : coclosed.basis) {
        Cochain source = make_cochain(c, k, detail::expand_support(v, tc));
        Cochain field = detail::window_causal(out.op, source);
        check_interior_residual(field, "solution_space");
        if (modulo_gauge.insert(field.values)) {
            out.sources.push_back(std::move(source));
            out.representatives.push_back(std::move(field));
        }
    }
    out.n_images = static_cast<int>(out.representatives.size());
    if (out.n_images != out.source_quotient_dim)
        throw Error("solution_space: marched " + std::to_string(out.n_images) +
                    " independent fields but the source classification gives " +
                    std::to_string(out.source_quotient_dim));

    // -- phase two: partner fields for the dying flux classes ---------------
    out.dying_representatives = detail::dying_flux_classes(c, k);
    if (!out.dying_representatives.empty()) {
        int eq = static_cast<int>(cc.size());
        int rows = eq + static_cast<int>(out.dying_representatives.size());
        RationalMatrix sys(rows, n1);
        for (int r = 0; r < eq; ++r) sys.row[static_cast<size_t>(r)] = wave.row[static_cast<size_t>(cc[static_cast<size_t>(r)])];
        for (size_t i = 0; i < out.dying_representatives.size(); ++i) {
            // the flux pairing <θ, dA> as a row over A, via the adjoint of d
            Cochain codiff = apply_delta(out.dying_representatives[i]);
            SparseVec rowv;
            for (const auto& [g, v] : codiff.values.terms) {
                Rat entry = v * X.metric[static_cast<size_t>(k)][static_cast<size_t>(g)];
                if (entry != 0) sv_set(rowv, g, entry);
            }
            sys.row[static_cast<size_t>(eq) + i] = std::move(rowv);
        }
        ColumnSolver partner_solver(submatrix(sys, detail::all_rows(rows), tc));
        for (size_t i = 0; i < out.dying_representatives.size(); ++i) {
            auto x = partner_solver.solve(sv_unit(eq + static_cast<int>(i)));
            if (!x)
                throw Error("solution_space: no time-compact field carries flux class " +
                            std::to_string(i) + " while solving the interior wave equation");
            Cochain field = make_cochain(c, k, detail::expand_support(*x, tc));
            check_interior_residual(field, "solution_space");
            Cochain strength = apply_d(field);
            for (size_t l = 0; l < out.dying_representatives.size(); ++l) {
                Rat got = metric_pairing(out.dying_representatives[l], strength);
                if (got != ((l == i) ? 1 : 0))
                    throw Error("solution_space: partner field has wrong flux normalization");
            }
            if (!modulo_gauge.insert(field.values))
                throw Error("solution_space: partner field is gauge-equivalent to earlier fields");
            out.representatives.push_back(std::move(field));
        }
    }
    out.n_partners = static_cast<int>(out.representatives.size()) - out.n_images;
    return out;
}

// ---------------------------------------------------------------------------
// Observables
// ---------------------------------------------------------------------------

struct MaxwellObservables {
    ComplexPtr complex;
    int degree = 0;
    std::vector<int> support_cells;       // compactly supported k-cells, ascending

    Subspace inv;                         // coclosed densities, support_cells coords
    Subspace van;                         // the part vanishing on every solution
    QuotientMap obs;                      // observables: inv modulo van
    std::vector<Cochain> representatives; // one coclosed density per observable
    RationalMatrix gram;                  // causal pairing on the observable basis
    Subspace radical_basis;               // null directions of gram, observable coords
    RationalMatrix evaluation;            // <inv basis, solution> pairing matrix
    MaxwellSolutions solutions;           // the solution basis everything was audited against

    int dim() const { return obs.dim(); }
};

// Gauge-invariant observables with their causal pairing.
//
// Invariance against A -> A + dχ for arbitrary χ forces the density to be
// coclosed with no support condition on χ's side, so `inv` is the kernel of
// the full codifferential restricted to compactly supported columns. The
// causal pairing τ(ω, ω') = <ω, G ω'> is computed by marching and checked to
// be exactly antisymmetric. Densities that pair to zero with every solution
// form `van`; that left kernel is certified twice over:
//
//   * wave images of compact fields that stay compact evaluate to zero on
//     shell (equation rows hold wherever such a density is supported), and
//     every such image is contained in `van`;
//   * `van` is contained in the wave images of time-compact fields staying
//     compact, and those images exhaust the null space of τ on `inv`.
//
// The observable space is the quotient, its pairing the restriction, and the
// solution pairing matrix must have full rank on both sides: no solution is
// invisible, no observable class is redundant.
inline MaxwellObservables observables(const ComplexPtr& c, int k, MaxwellSolutions sols) {
    const SpacetimeComplex& X = *c;
    detail::check_field_degree(X, k, "observables");
    if (sols.complex->uid != c->uid)
        throw ComplexMismatch("observables: solution space lives on a different complex");
    if (sols.degree != k)
        throw DegreeMismatch("observables: solution space has degree " +
                             std::to_string(sols.degree) + ", expected " + std::to_string(k));

    MaxwellObservables out;
    out.complex = c;
    out.degree = k;
    out.solutions = std::move(sols);

    int n1 = X.n_cells[static_cast<size_t>(k)];
    int n0 = X.n_cells[static_cast<size_t>(k) - 1];
    out.support_cells = allowed_cells(X, k, supp_c);
    const std::vector<int>& cc = out.support_cells;
    std::vector<int> tc = allowed_cells(X, k, supp_tc);
    RationalMatrix div = full_codifferential(X, k);
    RationalMatrix wave = mat_mul(full_codifferential(X, k + 1), X.d_full[static_cast<size_t>(k)]);

    out.inv = kernel_basis(submatrix(div, detail::all_rows(n0), cc));
    int nv = out.inv.dim();
    std::vector<Cochain> inv_cochains;
    inv_cochains.reserve(static_cast<size_t>(nv));
    for (const SparseVec& b : out.inv.basis)
        inv_cochains.push_back(make_cochain(c, k, detail::expand_support(b, cc)));

    // -- evaluation against the solution basis ------------------------------
    out.evaluation = RationalMatrix(nv, out.solutions.dim());
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < out.solutions.dim(); ++j) {
            Rat v = metric_pairing(inv_cochains[static_cast<size_t>(i)],
                                   out.solutions.representatives[static_cast<size_t>(j)]);
            if (v != 0) out.evaluation.set(i, j, v);
        }
    if (rank_of(out.evaluation) != out.solutions.dim())
        throw Error("observables: some solution evaluates to zero on every invariant density");

    // left kernel: densities invisible on shell
    Subspace left_kernel = kernel_basis(transpose(out.evaluation)); // inv-coefficient coords
    std::vector<SparseVec> van_gens;
    van_gens.reserve(left_kernel.basis.size());
    for (const SparseVec& z : left_kernel.basis) {
        SparseVec acc;
        for (const auto& [i, coeff] : z.terms)
            acc = sv_axpy(acc, coeff, out.inv.basis[static_cast<size_t>(i)]);
        van_gens.push_back(std::move(acc));
    }
    out.van = span_of(static_cast<int>(cc.size()), van_gens);

    // -- certify the invisible part against wave images ---------------------
    std::vector<int> outside = detail::complement_rows(n1, cc);
    Subspace stay_c = kernel_basis(submatrix(wave, outside, cc));
    Subspace images_c = image_basis(
        mat_mul(submatrix(wave, cc, cc), detail::basis_columns(stay_c)));
    for (const SparseVec& b : images_c.basis)
        if (!out.van.contains(b))
            throw Error("observables: a compact-staying wave image is visible on shell");
    Subspace stay_t = kernel_basis(submatrix(wave, outside, tc));
    Subspace images_t = image_basis(
        mat_mul(submatrix(wave, cc, tc), detail::basis_columns(stay_t)));
    for (const SparseVec& b : out.van.basis)
        if (!images_t.contains(b))
            throw Error("observables: an on-shell-invisible density is not a wave image");

    // -- causal pairing on densities ----------------------------------------
    RationalMatrix pairing(nv, nv);
    for (int j = 0; j < nv; ++j) {
        Cochain propagated = detail::window_causal(out.solutions.op, inv_cochains[static_cast<size_t>(j)]);
        for (int i = 0; i < nv; ++i) {
            Rat v = metric_pairing(inv_cochains[static_cast<size_t>(i)], propagated);
            if (v != 0) pairing.set(i, j, v);
        }
    }
    for (int i = 0; i < nv; ++i)
        for (const auto& [j, v] : pairing.row[static_cast<size_t>(i)].terms) {
            Rat w = sv_get(pairing.row[static_cast<size_t>(j)], i);
            if (v + w != 0)
                throw Error("observables: causal pairing is not antisymmetric");
        }

    // the pairing's null space is exactly the time-compact staying images
    Subspace pairing_null = kernel_basis(pairing); // inv-coefficient coords
    for (const SparseVec& z : left_kernel.basis)
        if (!pairing_null.contains(z))
            throw Error("observables: the causal pairing does not vanish on an invisible density");
    Subspace null_cc = span_of(static_cast<int>(cc.size()), [&] {
        std::vector<SparseVec> gens;
        gens.reserve(pairing_null.basis.size());
        for (const SparseVec& z : pairing_null.basis) {
            SparseVec acc;
            for (const auto& [i, coeff] : z.terms)
                acc = sv_axpy(acc, coeff, out.inv.basis[static_cast<size_t>(i)]);
            gens.push_back(std::move(acc));
        }
        return gens;
    }());
    if (null_cc.dim() != images_t.dim())
        throw Error("observables: pairing null space and staying wave images disagree");
    for (const SparseVec& b : images_t.basis)
        if (!null_cc.contains(b))
            throw Error("observables: a staying wave image escapes the pairing null space");

    // -- quotient to observables --------------------------------------------
    out.obs = quotient_coordinates(out.van, out.inv);
    if (out.obs.dim() != rank_of(out.evaluation))
        throw Error("observables: quotient dimension disagrees with the evaluation rank");
    out.representatives.reserve(static_cast<size_t>(out.obs.dim()));
    for (const SparseVec& rep : out.obs.reps)
        out.representatives.push_back(make_cochain(c, k, detail::expand_support(rep, cc)));

    // class representatives are inv basis vectors; restrict the pairing
    out.gram = RationalMatrix(out.obs.dim(), out.obs.dim());
    int van_count = out.van.dim();
    for (int i = 0; i < out.obs.dim(); ++i)
        for (int j = 0; j < out.obs.dim(); ++j) {
            int bi = out.obs.class_gens[static_cast<size_t>(i)] - van_count;
            int bj = out.obs.class_gens[static_cast<size_t>(j)] - van_count;
            Rat v = sv_get(pairing.row[static_cast<size_t>(bi)], bj);
            if (v != 0) out.gram.set(i, j, v);
        }
    out.radical_basis = kernel_basis(out.gram);
    return out;
}

inline MaxwellObservables observables(const ComplexPtr& c, int k) {
    detail::check_field_degree(*c, k, "observables");
    return observables(c, k, solution_space(c, k));
}

// ---------------------------------------------------------------------------
// Radical of the pairing, cross-checked against flux classes
// ---------------------------------------------------------------------------

struct RadicalCheck {
    Subspace basis;                   // null directions of the pairing, observable coords
    int dying_dim = 0;                // flux classes with no time-compact source
    std::vector<SparseVec> witnesses; // observable coords, one witness per dying class

    int dim() const { return basis.dim(); }
};

// The null space of the observable pairing, certified flux class by flux
// class: for each compact flux class θ that dies under relaxed time support,
// the functional A -> <θ, dA> on solutions is represented by an invariant
// density (solvable because the evaluation pairing has full rank), and these
// witnesses must span the radical exactly — one independent null direction
// per dying class, no more, no fewer.
inline RadicalCheck radical(const MaxwellObservables& ob) {
    RadicalCheck out;
    out.basis = ob.radical_basis;
    out.dying_dim = static_cast<int>(ob.solutions.dying_representatives.size());

    ColumnSolver represent(transpose(ob.evaluation));
    std::vector<SparseVec> expanded; // witnesses in support-cell coords
    for (const Cochain& theta : ob.solutions.dying_representatives) {
        SparseVec target;
        for (int j = 0; j < ob.solutions.dim(); ++j) {
            Rat v = metric_pairing(theta, apply_d(ob.solutions.representatives[static_cast<size_t>(j)]));
            if (v != 0) sv_set(target, j, v);
        }
        auto coeff = represent.solve(target);
        if (!coeff)
            throw Error("radical: flux pairing is not representable by an invariant density");
        SparseVec acc;
        for (const auto& [i, cf] : coeff->terms)
            acc = sv_axpy(acc, cf, ob.inv.basis[static_cast<size_t>(i)]);
        SparseVec w = sv_from_dense(ob.obs.coords(acc));
        if (!ob.radical_basis.contains(w))
            throw Error("radical: a flux witness pairs nontrivially with some observable");
        out.witnesses.push_back(std::move(w));
        expanded.push_back(out.witnesses.back());
    }

    Subspace span = span_of(ob.dim(), expanded);
    if (span.dim() != out.dying_dim)
        throw Error("radical: flux witnesses are not independent");
    if (span.dim() != out.basis.dim())
        throw Error("radical: pairing has " + std::to_string(out.basis.dim()) +
                    " null directions but " + std::to_string(out.dying_dim) +
                    " dying flux classes");
    return out;
}

// ---------------------------------------------------------------------------
// Gauge fixing
// ---------------------------------------------------------------------------

// A gauge shift χ bringing A to the divergence-free gauge: split A across the
// middle of the window, propagate the future part with the retarded inverse
// and the past part with the advanced one, and take -δ of the sum. The result
// satisfies δ(A + dχ) = 0 away from the two seeding slices at each time end.
inline Cochain lorenz_gauge_fix(const DAlembertOperator& op, const Cochain& A) {
    if (A.complex->uid != op.complex->uid)
        throw ComplexMismatch("lorenz_gauge_fix: field lives on a different complex");
    if (A.degree != op.degree)
        throw DegreeMismatch("lorenz_gauge_fix: field degree mismatch");
    const SpacetimeComplex& X = *op.complex;
    int k = op.degree, T = X.T();
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    int cut = (T + 1) / 2;

    Cochain future{A.complex, k, {}}, past{A.complex, k, {}};
    for (const auto& [gid, v] : A.values.terms) {
        int level = (gid < ub) ? gid / nu : (gid - ub) / nw;
        ((level >= cut) ? future : past).values.terms.push_back({gid, v});
    }
    Cochain plus = detail::march(op, op.forward, op.box, future);
    Cochain minus = detail::apply_mirror(
        op, detail::march(op, op.backward, op.box_mirrored, detail::apply_mirror(op, past)));
    Cochain sum{A.complex, k, sv_add(plus.values, minus.values)};
    Cochain chi = apply_delta(sum);
    chi.values = sv_scale(chi.values, Rat(-1));
    return chi;
}

// ---------------------------------------------------------------------------
// Maps of observables along embeddings
// ---------------------------------------------------------------------------

// Matrix of the pushforward on observable classes: target coords × source
// basis. Well-definedness is checked — densities invisible on the source
// must push to densities invisible on the target.
inline RationalMatrix observable_map(const Embedding& e, const MaxwellObservables& src,
                                     const MaxwellObservables& dst) {
    if (src.complex->uid != e.source->uid || dst.complex->uid != e.target->uid)
        throw ComplexMismatch("observable_map: observables do not match the embedding ends");
    if (src.degree != dst.degree)
        throw DegreeMismatch("observable_map: source and target degrees differ");

    auto push_density = [&](const SparseVec& local) {
        Cochain w = make_cochain(src.complex, src.degree,
                                 detail::expand_support(local, src.support_cells));
        Cochain p = pushforward(e, w, supp_c);
        return detail::compress_support(p.values, dst.support_cells, *dst.complex, dst.degree,
                                        "observable_map");
    };

    for (const SparseVec& b : src.van.basis)
        if (!dst.van.contains(push_density(b)))
            throw Error("observable_map: an on-shell-invisible density pushes to a visible one");

    RationalMatrix out(dst.dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
        std::vector<Rat> col = dst.obs.coords(push_density(src.obs.reps[static_cast<size_t>(j)]));
        for (int i = 0; i < dst.dim(); ++i)
            if (col[static_cast<size_t>(i)] != 0) out.set(i, j, col[static_cast<size_t>(i)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Locality kernel
// ---------------------------------------------------------------------------

struct LocalityKernel {
    RationalMatrix map;               // observable map, target coords × source basis
    Subspace kernel;                  // source observable coords
    std::vector<Cochain> generators;  // coclosed densities spanning the kernel
    int flux_kernel_dim = 0;          // kernel of the induced compact flux-class map
};

// Observables of the sub-window that become invisible in the larger one.
// The kernel dimension is re-derived from cohomology: it must equal the
// kernel of the induced map on compact flux classes one degree up, and the
// kernel must consist of null directions of the source pairing — losing a
// symplectically active observable would be a contradiction, not locality.
inline LocalityKernel locality_kernel(const Embedding& e, const MaxwellObservables& src,
                                      const MaxwellObservables& dst) {
    LocalityKernel out;
    out.map = observable_map(e, src, dst);
    out.kernel = kernel_basis(out.map);

    RationalMatrix flux = induced_map(e, src.degree + 1, supp_c, Flavor::d);
    out.flux_kernel_dim = flux.cols - rank_of(flux);
    if (out.flux_kernel_dim != out.kernel.dim())
        throw Error("locality_kernel: observable kernel has dimension " +
                    std::to_string(out.kernel.dim()) + " but the flux-class kernel has " +
                    std::to_string(out.flux_kernel_dim));
    for (const SparseVec& b : out.kernel.basis)
        if (!src.radical_basis.contains(b))
            throw Error("locality_kernel: a symplectically active observable becomes invisible");

    out.generators.reserve(out.kernel.basis.size());
    for (const SparseVec& b : out.kernel.basis) {
        SparseVec acc;
        for (const auto& [i, coeff] : b.terms)
            acc = sv_axpy(acc, coeff, src.obs.reps[static_cast<size_t>(i)]);
        out.generators.push_back(make_cochain(src.complex, src.degree,
                                              detail::expand_support(acc, src.support_cells)));
    }
    return out;
}

inline LocalityKernel locality_kernel(const Embedding& e, int k) {
    MaxwellObservables src = observables(e.source, k);
    MaxwellObservables dst = observables(e.target, k);
    return locality_kernel(e, src, dst);
}

// ---------------------------------------------------------------------------
// No-go witness
// ---------------------------------------------------------------------------

struct NoGoWitness {
    bool found = false;
    SparseVec witness;       // source observable coords
    Cochain representative;  // coclosed density for it
    SparseVec image;         // observable coords of its pushforward along `alive`
    int partner = -1;        // target observable pairing nontrivially with the image
    Rat pairing = 0;         // the exact pairing value
};

// One region, two enlargements, incompatible demands. Searches the source
// radical for a class that is annihilated when pushed along `killed` yet
// pairs nontrivially in the target of `alive`: such a witness shows that no
// assignment of pairings can simultaneously be degenerate-free and restrict
// faithfully along every embedding. Returns found = false when no radical
// class behaves that way.
inline NoGoWitness no_go_witness(const Embedding& alive, const Embedding& killed, int k) {
    if (alive.source->uid != killed.source->uid)
        throw ComplexMismatch("no_go_witness: the two embeddings have different sources");

    MaxwellObservables src = observables(alive.source, k);
    MaxwellObservables live_dst = observables(alive.target, k);
    MaxwellObservables dead_dst = observables(killed.target, k);
    RationalMatrix live_map = observable_map(alive, src, live_dst);
    RationalMatrix dead_map = observable_map(killed, src, dead_dst);

    Subspace candidates = subspace_intersection(src.radical_basis, kernel_basis(dead_map));
    NoGoWitness out;
    for (const SparseVec& b : candidates.basis) {
        SparseVec image = mat_vec(live_map, b);
        SparseVec against = mat_vec(live_dst.gram, image);
        if (against.is_zero()) continue;
        out.found = true;
        out.witness = b;
        out.image = std::move(image);
        out.partner = against.terms.front().first;
        out.pairing = against.terms.front().second;
        SparseVec acc;
        for (const auto& [i, coeff] : b.terms)
            acc = sv_axpy(acc, coeff, src.obs.reps[static_cast<size_t>(i)]);
        out.representative = make_cochain(src.complex, k,
                                          detail::expand_support(acc, src.support_cells));
        return out;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Causal factorization
// ---------------------------------------------------------------------------

struct CausalityReport {
    int dim1 = 0, dim2 = 0;  // coclosed compact densities on each region
    RationalMatrix block;    // their mutual causal pairing — verified zero
};

namespace detail {

// Coclosed compactly supported densities of a window, without the solution
// audit (enough for pairing blocks across regions).
inline std::pair<std::vector<int>, Subspace> coclosed_compact(const ComplexPtr& c, int k) {
    const SpacetimeComplex& X = *c;
    std::vector<int> cc = allowed_cells(X, k, supp_c);
    int n0 = X.n_cells[static_cast<size_t>(k) - 1];
    Subspace inv = kernel_basis(submatrix(full_codifferential(X, k), all_rows(n0), cc));
    return {std::move(cc), std::move(inv)};
}

// Symmetric causal shadow of a set of k-cells, per time slice, grown with the
// stencil adjacency of the wave operator.
inline Shadow region_shadow(const DAlembertOperator& op, const std::vector<bool>& seed) {
    const SpacetimeComplex& X = *op.complex;
    int T = X.T();
    int k = op.degree;
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;

    std::vector<std::vector<bool>> fu(static_cast<size_t>(T) + 1, std::vector<bool>(static_cast<size_t>(nu), false));
    std::vector<std::vector<bool>> fw(static_cast<size_t>(T), std::vector<bool>(static_cast<size_t>(nw), false));
    for (int gid = 0; gid < static_cast<int>(seed.size()); ++gid) {
        if (!seed[static_cast<size_t>(gid)]) continue;
        if (gid < ub) fu[static_cast<size_t>(gid / nu)][static_cast<size_t>(gid % nu)] = true;
        else fw[static_cast<size_t>((gid - ub) / nw)][static_cast<size_t>((gid - ub) % nw)] = true;
    }
    Shadow sh;
    sh.u.assign(static_cast<size_t>(T) + 1, std::vector<bool>(static_cast<size_t>(nu), false));
    sh.w.assign(static_cast<size_t>(T), std::vector<bool>(static_cast<size_t>(nw), false));
    auto merge = [](std::vector<bool>& a, const std::vector<bool>& b) {
        for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] || b[i];
    };
    std::vector<bool> su(static_cast<size_t>(nu), false), sw(static_cast<size_t>(nw), false);
    for (int t = 0; t <= T; ++t) {
        if (t > 0) { grow(su, op.adj_u); grow(sw, op.adj_w); }
        merge(su, fu[static_cast<size_t>(t)]);
        if (t < T) merge(sw, fw[static_cast<size_t>(t)]);
        merge(sh.u[static_cast<size_t>(t)], su);
        if (t < T) merge(sh.w[static_cast<size_t>(t)], sw);
    }
    su.assign(static_cast<size_t>(nu), false);
    sw.assign(static_cast<size_t>(nw), false);
    for (int t = T; t >= 0; --t) {
        if (t < T) { grow(su, op.adj_u); grow(sw, op.adj_w); }
        merge(su, fu[static_cast<size_t>(t)]);
        if (t > 0) merge(sw, fw[static_cast<size_t>(t) - 1]);
        merge(sh.u[static_cast<size_t>(t)], su);
        if (t > 0) merge(sh.w[static_cast<size_t>(t) - 1], sw);
    }
    return sh;
}

} // namespace detail

// Vanishing of the causal pairing across causally disconnected regions.
// Both embeddings must land in the same complex; the causal shadow of the
// first image must not meet the second image (combinatorial check on the
// stencil adjacency — ShadowsIntersect otherwise). The pairing block between
// the pushed coclosed densities of the two regions is then computed by
// marching and verified to vanish identically.
inline CausalityReport causality_check(const Embedding& f1, const Embedding& f2, int k) {
    if (f1.target->uid != f2.target->uid)
        throw ComplexMismatch("causality_check: embeddings land in different complexes");
    const ComplexPtr& c = f1.target;
    const SpacetimeComplex& X = *c;
    detail::check_field_degree(X, k, "causality_check");

    int n1 = X.n_cells[static_cast<size_t>(k)];
    std::vector<bool> image1(static_cast<size_t>(n1), false), image2(static_cast<size_t>(n1), false);
    for (int g = 0; g < f1.source->n_cells[static_cast<size_t>(k)]; ++g)
        image1[static_cast<size_t>(map_cell(f1, k, g))] = true;
    for (int g = 0; g < f2.source->n_cells[static_cast<size_t>(k)]; ++g)
        image2[static_cast<size_t>(map_cell(f2, k, g))] = true;

    DAlembertOperator op = build_dalembert(c, k);
    detail::Shadow sh = detail::region_shadow(op, image1);
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    for (int g = 0; g < n1; ++g) {
        if (!image2[static_cast<size_t>(g)]) continue;
        bool hit = (g < ub) ? sh.u[static_cast<size_t>(g / nu)][static_cast<size_t>(g % nu)]
                            : sh.w[static_cast<size_t>((g - ub) / nw)][static_cast<size_t>((g - ub) % nw)];
        if (hit)
            throw ShadowsIntersect("causality_check: the causal shadow of the first region " +
                                   std::string("meets the second at ") + describe_cell(X, k, g));
    }

    auto [cc1, inv1] = detail::coclosed_compact(f1.source, k);
    auto [cc2, inv2] = detail::coclosed_compact(f2.source, k);
    auto push = [&](const Embedding& e, const std::vector<int>& cells, const SparseVec& b) {
        Cochain w = make_cochain(e.source, k, detail::expand_support(b, cells));
        return pushforward(e, w, supp_c);
    };

    CausalityReport out;
    out.dim1 = inv1.dim();
    out.dim2 = inv2.dim();
    out.block = RationalMatrix(out.dim1, out.dim2);
    std::vector<Cochain> pushed1;
    pushed1.reserve(static_cast<size_t>(out.dim1));
    for (const SparseVec& b : inv1.basis) pushed1.push_back(push(f1, cc1, b));
    for (int j = 0; j < out.dim2; ++j) {
        Cochain propagated = detail::window_causal(op, push(f2, cc2, inv2.basis[static_cast<size_t>(j)]));
        for (int i = 0; i < out.dim1; ++i)
            if (metric_pairing(pushed1[static_cast<size_t>(i)], propagated) != 0)
                throw Error("causality_check: nonzero pairing between causally disconnected regions");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Time-slice reduction
// ---------------------------------------------------------------------------

struct TimesliceReport {
    int source_dim = 0, target_dim = 0, rank = 0;
    RationalMatrix map;  // observable map — verified bijective
};

// A window covering the full spatial geometry over a shorter time interval
// already carries every observable: the pushforward on observable classes is
// a bijection. The embedding must be a pure time sub-window (identical
// spatial components, zero spatial offsets) and thick enough for the causal
// marches on the source — at least 3 interior slices.
inline TimesliceReport timeslice_check(const Embedding& e, int k) {
    const SpacetimeComplex& S = *e.source;
    const SpacetimeComplex& G = *e.target;
    if (S.comps.size() != G.comps.size())
        throw ValidationError("timeslice_check: the sub-window must cover every spatial component");
    for (size_t i = 0; i < e.maps.size(); ++i) {
        const ComponentMap& cm = e.maps[i];
        const SpatialComponent& sc = S.comps[i];
        const SpatialComponent& tc = G.comps[static_cast<size_t>(cm.target_comp)];
        bool full = sc.axes.size() == tc.axes.size();
        for (size_t a = 0; full && a < sc.axes.size(); ++a)
            full = sc.axes[a].kind == tc.axes[a].kind && sc.axes[a].n == tc.axes[a].n &&
                   cm.axis_offset[a] == 0;
        if (!full)
            throw ValidationError("timeslice_check: embedding is not a pure time sub-window " +
                                  std::string("(component ") + std::to_string(i) +
                                  " does not cover its target)");
    }
    if (S.T() - 1 < 3)
        throw WindowTooThin("timeslice_check: the sub-window has " + std::to_string(S.T() - 1) +
                            " interior slices; the causal seeding needs at least 3");

    MaxwellObservables src = observables(e.source, k);
    MaxwellObservables dst = observables(e.target, k);
    TimesliceReport out;
    out.map = observable_map(e, src, dst);
    out.source_dim = src.dim();
    out.target_dim = dst.dim();
    out.rank = rank_of(out.map);
    if (out.rank != out.source_dim || out.rank != out.target_dim)
        throw Error("timeslice_check: observable map is not bijective (" +
                    std::to_string(out.source_dim) + " -> " + std::to_string(out.target_dim) +
                    ", rank " + std::to_string(out.rank) + ")");
    return out;
}

// ---------------------------------------------------------------------------
// Isotony
// ---------------------------------------------------------------------------

struct IsotonyRegion {
    int obs_dim = 0;       // observables of the region
    int kernel_dim = 0;    // classes invisible in the ambient complex
    int quotient_dim = 0;  // faithful image inside the ambient observables
};

struct IsotonyReport {
    int ambient_dim = 0;
    std::vector<IsotonyRegion> regions;
};

// The isotone net: after quotienting each region's observables by the kernel
// of its pushforward, the induced maps into the ambient complex are
// injective — region observables embed faithfully once their locality
// kernels are removed. Injectivity is a rank identity and is verified.
inline IsotonyReport isotony_quotient(const std::vector<Embedding>& regions, int k) {
    if (regions.empty()) throw ValidationError("isotony_quotient: no regions given");
    for (const Embedding& e : regions)
        if (e.target->uid != regions.front().target->uid)
            throw ComplexMismatch("isotony_quotient: regions embed into different complexes");

    MaxwellObservables ambient = observables(regions.front().target, k);
    IsotonyReport out;
    out.ambient_dim = ambient.dim();
    for (const Embedding& e : regions) {
        MaxwellObservables src = observables(e.source, k);
        RationalMatrix map = observable_map(e, src, ambient);
        int kdim = kernel_basis(map).dim();
        int rank = rank_of(map);
        if (rank != src.dim() - kdim)
            throw Error("isotony_quotient: induced map fails to be injective on the quotient");
        out.regions.push_back({src.dim(), kdim, src.dim() - kdim});
    }
    return out;
}

} // namespace gaugeloc
