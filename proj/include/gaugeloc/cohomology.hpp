#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <gaugeloc/complex.hpp>
#include <gaugeloc/matrix.hpp>
#include <gaugeloc/smith.hpp>

namespace gaugeloc {

// ---------------------------------------------------------------------------
// Differential flavor
//
// Flavor d uses the coboundary; flavor delta uses the codifferential. A
// cochain model with literal boundary strata represents "compact support"
// as vanishing on the strata, and the metric dual of that discipline is the
// opposite one: the codifferential complex attached to support s runs over
// the cells of the complementary support. This is what makes the dimension
// relation dim H^k_{s,delta} = dim H^{m-k}_{s,d} come out exactly.
// ---------------------------------------------------------------------------

enum class Flavor { d, delta };

inline std::string flavor_name(Flavor f) { return f == Flavor::d ? "d" : "delta"; }

inline SupportSystem complement(const SupportSystem& s) {
    auto flip = [](Flag f) { return f == Flag::Free ? Flag::Compact : Flag::Free; };
    return SupportSystem{flip(s.time_flag), flip(s.space_flag)};
}

// ---------------------------------------------------------------------------
// Support-restricted cohomology
// ---------------------------------------------------------------------------

struct CohomologySpace {
    ComplexPtr complex;
    int degree = 0;
    SupportSystem support = supp_unrestricted;
    Flavor flavor = Flavor::d;
    std::vector<int> cells;              // cell world the classes live on
    std::vector<Cochain> representatives; // one cocycle per class
    QuotientMap classes;                  // cocycle (in world coords) -> class coords

    int dim() const { return classes.dim(); }

    // Class coordinates of a cocycle of this flavor and support.
    std::vector<Rat> coordinates(const Cochain& w) const {
        if (w.complex->uid != complex->uid)
            throw ComplexMismatch("cohomology coordinates: cochain lives on a different complex");
        if (w.degree != degree)
            throw DegreeMismatch("cohomology coordinates: expected degree " +
                                 std::to_string(degree) + ", got " + std::to_string(w.degree));
        SparseVec local;
        size_t pos = 0;
        for (const auto& [gid, v] : w.values.terms) {
            while (pos < cells.size() && cells[pos] < gid) ++pos;
            if (pos == cells.size() || cells[pos] != gid)
                throw ValidationError("cohomology coordinates: cochain is nonzero outside the "
                                      "support world at " + describe_cell(*complex, degree, gid));
            local.terms.push_back({static_cast<int>(pos), v});
        }
        return classes.coords(local);
    }
};

namespace detail {

inline Cochain cochain_from_world(const ComplexPtr& c, int degree, const std::vector<int>& cells,
                                  const SparseVec& local) {
    Cochain out{c, degree, {}};
    for (const auto& [i, v] : local.terms)
        out.values.terms.push_back({cells[static_cast<size_t>(i)], v});
    std::sort(out.values.terms.begin(), out.values.terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

} // namespace detail

inline CohomologySpace cohomology(const ComplexPtr& c, int k, const SupportSystem& s,
                                  Flavor flavor) {
    if (k < 0 || k > c->m)
        throw DegreeMismatch("cohomology: degree " + std::to_string(k) + " outside 0.." +
                             std::to_string(c->m));
    SupportSystem world = (flavor == Flavor::d) ? s : complement(s);
    std::vector<int> cells = allowed_cells(*c, k, world);
    int n = static_cast<int>(cells.size());

    Subspace closed, exact;
    if (flavor == Flavor::d) {
        closed = (k < c->m) ? kernel_basis(coboundary_matrix(*c, k, world)) : full_space(n);
        exact = (k > 0) ? image_basis(coboundary_matrix(*c, k - 1, world)) : span_of(n, {});
    } else {
        closed = (k > 0) ? kernel_basis(codifferential_matrix(*c, k, world)) : full_space(n);
        exact = (k < c->m) ? image_basis(codifferential_matrix(*c, k + 1, world)) : span_of(n, {});
    }

    CohomologySpace out;
    out.complex = c;
    out.degree = k;
    out.support = s;
    out.flavor = flavor;
    out.cells = std::move(cells);
    out.classes = quotient_coordinates(exact, closed);
    out.representatives.reserve(static_cast<size_t>(out.classes.dim()));
    for (const SparseVec& rep : out.classes.reps)
        out.representatives.push_back(detail::cochain_from_world(c, k, out.cells, rep));
    return out;
}

// ---------------------------------------------------------------------------
// Induced maps: compact-type supports push forward (covariant), the fully
// unrestricted support pulls back (contravariant, target to source).
// ---------------------------------------------------------------------------

inline RationalMatrix induced_map(const Embedding& e, int k, const SupportSystem& s,
                                  Flavor flavor) {
    CohomologySpace src = cohomology(e.source, k, s, flavor);
    CohomologySpace dst = cohomology(e.target, k, s, flavor);
    SupportSystem world = (flavor == Flavor::d) ? s : complement(s);
    bool covariant = (s.time_flag == Flag::Compact) || (s.space_flag == Flag::Compact);

    if (covariant) {
        RationalMatrix out(dst.dim(), src.dim());
        for (int j = 0; j < src.dim(); ++j) {
            Cochain pushed = pushforward(e, src.representatives[static_cast<size_t>(j)], world);
            std::vector<Rat> col = dst.coordinates(pushed);
            for (int i = 0; i < dst.dim(); ++i)
                if (col[static_cast<size_t>(i)] != 0) out.set(i, j, col[static_cast<size_t>(i)]);
        }
        return out;
    }
    RationalMatrix out(src.dim(), dst.dim());
    for (int j = 0; j < dst.dim(); ++j) {
        Cochain pulled = pullback(e, dst.representatives[static_cast<size_t>(j)]);
        std::vector<Rat> col = src.coordinates(pulled);
        for (int i = 0; i < src.dim(); ++i)
            if (col[static_cast<size_t>(i)] != 0) out.set(i, j, col[static_cast<size_t>(i)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Split view: degree-k cochains decompose into a spatial k-cochain per time
// vertex (u) and a spatial (k-1)-cochain per time edge (w).
// ---------------------------------------------------------------------------

namespace detail {

struct SplitCochain {
    int k = 0;
    int nu = 0; // spatial cells per time vertex
    int nw = 0; // spatial cells per time edge
    std::vector<SparseVec> u; // size T+1
    std::vector<SparseVec> w; // size T
};

inline SplitCochain split(const Cochain& ω) {
    const SpacetimeComplex& X = *ω.complex;
    int k = ω.degree, T = X.T();
    SplitCochain s;
    s.k = k;
    s.nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    s.nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    s.u.assign(static_cast<size_t>(T) + 1, {});
    s.w.assign(static_cast<size_t>(T), {});
    int ub = X.u_block(k);
    for (const auto& [gid, v] : ω.values.terms) {
        if (gid < ub) {
            s.u[static_cast<size_t>(gid / s.nu)].terms.push_back({gid % s.nu, v});
        } else {
            int r = gid - ub;
            s.w[static_cast<size_t>(r / s.nw)].terms.push_back({r % s.nw, v});
        }
    }
    return s;
}

inline Cochain assemble(const ComplexPtr& c, int k, const std::vector<SparseVec>& u,
                        const std::vector<SparseVec>& w) {
    const SpacetimeComplex& X = *c;
    int T = X.T();
    Cochain out{c, k, {}};
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    int ub = X.u_block(k);
    for (int t = 0; t <= T && t < static_cast<int>(u.size()); ++t)
        for (const auto& [sg, v] : u[static_cast<size_t>(t)].terms)
            if (v != 0) out.values.terms.push_back({t * nu + sg, v});
    for (int j = 0; j < T && j < static_cast<int>(w.size()); ++j)
        for (const auto& [sg, v] : w[static_cast<size_t>(j)].terms)
            if (v != 0) out.values.terms.push_back({ub + j * nw + sg, v});
    return out;
}

// sign carried by the time-edge part of degree-k cochains in the toolkit maps
inline Rat toolkit_sign(int k) { return (k % 2 == 1) ? Rat(1) : Rat(-1); }

} // namespace detail

// ---------------------------------------------------------------------------
// Time profiles: rational weights on interior time edges with total mass 1.
// ---------------------------------------------------------------------------

struct TimeProfile {
    ComplexPtr complex;
    SparseVec a; // indexed by time edge
};

inline void validate_profile(const TimeProfile& p) {
    const SpacetimeComplex& X = *p.complex;
    int T = X.T();
    Rat mass(0);
    for (const auto& [j, v] : p.a.terms) {
        if (j <= 0 || j >= T - 1)
            throw BadProfile("time profile touches the time boundary at edge " +
                             std::to_string(j));
        mass += v * X.time.spacing;
    }
    if (mass != 1)
        throw BadProfile("time profile mass is " + rat_to_string(mass) + ", expected 1/1");
}

inline TimeProfile default_profile(const ComplexPtr& c) {
    int T = c->T();
    if (T < 3)
        throw BadProfile("default time profile needs at least 3 time cells, got " +
                         std::to_string(T));
    TimeProfile p{c, sv_unit(T / 2)};
    p.a = sv_scale(p.a, Rat(1) / c->time.spacing);
    return p;
}

// ---------------------------------------------------------------------------
// Spatial cochains (fields on the spatial complex, indexed by spatial gid)
// ---------------------------------------------------------------------------

struct SpatialCochain {
    ComplexPtr complex;
    int degree = 0; // spatial degree; -1 encodes the zero space below degree 0
    SparseVec values;
};

// Integrate the time-edge components against the time spacing; spatial-type
// components are dropped. Output has spatial degree k-1.
inline SpatialCochain time_integration(const Cochain& w, const SupportSystem& s = supp_tc) {
    if (s.time_flag != Flag::Compact)
        throw ValidationError("time_integration: declared support must be timelike compact");
    require_support(w, s, "time_integration");
    int k = w.degree;
    SpatialCochain out{w.complex, k - 1, {}};
    if (k == 0) return out;
    detail::SplitCochain sp = detail::split(w);
    SparseVec acc;
    for (const SparseVec& wj : sp.w) acc = sv_add(acc, wj);
    out.values = sv_scale(acc, detail::toolkit_sign(k) * w.complex->time.spacing);
    return out;
}

// Extend a spatial (k-1)-cochain to a timelike-compact k-cochain using a
// normalized profile on interior time edges.
inline Cochain time_extension(const SpatialCochain& phi, const TimeProfile& a) {
    if (phi.complex->uid != a.complex->uid)
        throw ComplexMismatch("time_extension: profile lives on a different complex");
    validate_profile(a);
    const ComplexPtr& c = phi.complex;
    int k = phi.degree + 1;
    if (phi.degree < 0) return Cochain{c, 0, {}};
    if (phi.degree > c->m - 1)
        throw DegreeMismatch("time_extension: spatial degree " + std::to_string(phi.degree) +
                             " exceeds the spatial dimension");
    int T = c->T();
    std::vector<SparseVec> u(static_cast<size_t>(T) + 1), w(static_cast<size_t>(T));
    Rat sign = detail::toolkit_sign(k);
    for (const auto& [j, aj] : a.a.terms) w[static_cast<size_t>(j)] = sv_scale(phi.values, sign * aj);
    return detail::assemble(c, k, u, w);
}

// Cochain homotopy for the time-compact world: with normalized profile a,
//   d(Q w) + Q(d w) = e(i(w)) - w   exactly, and Q preserves tc support.
inline Cochain homotopy_Q(const Cochain& w, const TimeProfile& a) {
    if (w.complex->uid != a.complex->uid)
        throw ComplexMismatch("homotopy_Q: profile lives on a different complex");
    validate_profile(a);
    require_support(w, supp_tc, "homotopy_Q");
    int k = w.degree;
    const ComplexPtr& c = w.complex;
    if (k == 0) return Cochain{c, 0, {}};
    int T = c->T();
    detail::SplitCochain sp = detail::split(w);

    SparseVec W; // total of the time-edge parts
    for (const SparseVec& wj : sp.w) W = sv_add(W, wj);

    std::vector<SparseVec> q(static_cast<size_t>(T) + 1), none(static_cast<size_t>(T));
    SparseVec S; // prefix sum of w_j, j < t
    Rat A(0);    // prefix mass of the profile
    Rat h = c->time.spacing;
    for (int t = 0; t <= T; ++t) {
        q[static_cast<size_t>(t)] = sv_axpy(sv_scale(S, Rat(-1)), A, W);
        if (t < T) {
            S = sv_add(S, sp.w[static_cast<size_t>(t)]);
            A += h * sv_get(a.a, t);
        }
    }
    return detail::assemble(c, k - 1, q, none);
}

// Restriction to the time slice at vertex t0 (defaults to the middle vertex).
inline SpatialCochain slice_restriction(const Cochain& w, int base_t = -1) {
    const ComplexPtr& c = w.complex;
    int T = c->T();
    int t0 = (base_t < 0) ? T / 2 : base_t;
    if (t0 > T) throw ValidationError("slice_restriction: base vertex beyond the last slice");
    SpatialCochain out{c, w.degree, {}};
    if (w.degree >= c->m) return out; // top degree has no vertex-type part
    detail::SplitCochain sp = detail::split(w);
    out.values = sp.u[static_cast<size_t>(t0)];
    return out;
}

// Constant extension in time of a spatial k-cochain.
inline Cochain constant_extension(const SpatialCochain& phi) {
    const ComplexPtr& c = phi.complex;
    if (phi.degree < 0) return Cochain{c, 0, {}};
    if (phi.degree > c->m - 1) {
        // no vertex-type cells above the spatial top degree: only the zero
        // cochain extends, to the zero cochain
        if (!phi.values.is_zero())
            throw DegreeMismatch("constant_extension: spatial degree exceeds the spatial dimension");
        return Cochain{c, phi.degree, {}};
    }
    int T = c->T();
    std::vector<SparseVec> u(static_cast<size_t>(T) + 1, phi.values), w(static_cast<size_t>(T));
    return detail::assemble(c, phi.degree, u, w);
}

// Cochain homotopy for the spacelike-compact world: with base slice t0,
//   d(P w) + P(d w) = pi*(s*(w)) - w   exactly, and P preserves sc support.
inline Cochain homotopy_P(const Cochain& w, const SupportSystem& s = supp_sc, int base_t = -1) {
    if (s.space_flag != Flag::Compact)
        throw ValidationError("homotopy_P: declared support must be spacelike compact");
    require_support(w, s, "homotopy_P");
    int k = w.degree;
    const ComplexPtr& c = w.complex;
    if (k == 0) return Cochain{c, 0, {}};
    int T = c->T();
    int t0 = (base_t < 0) ? T / 2 : base_t;
    if (t0 > T) throw ValidationError("homotopy_P: base vertex beyond the last slice");
    detail::SplitCochain sp = detail::split(w);

    // signed partial sums of the time-edge parts from the base slice
    std::vector<SparseVec> p(static_cast<size_t>(T) + 1), none(static_cast<size_t>(T));
    SparseVec acc;
    for (int t = t0 + 1; t <= T; ++t) {
        acc = sv_add(acc, sp.w[static_cast<size_t>(t) - 1]);
        p[static_cast<size_t>(t)] = sv_scale(acc, Rat(-1));
    }
    acc = {};
    for (int t = t0 - 1; t >= 0; --t) {
        acc = sv_add(acc, sp.w[static_cast<size_t>(t)]);
        p[static_cast<size_t>(t)] = acc;
    }
    return detail::assemble(c, k - 1, p, none);
}

// ---------------------------------------------------------------------------
// Spatial cohomology (free or relative to the spatial boundary stratum)
// ---------------------------------------------------------------------------

inline std::vector<int> spatial_cells(const SpacetimeComplex& c, int j, bool rel) {
    std::vector<int> out;
    for (size_t ci = 0; ci < c.comps.size(); ++ci) {
        const SpatialComponent& comp = c.comps[ci];
        if (j > comp.dim()) continue;
        for (size_t i = 0; i < comp.cells[static_cast<size_t>(j)].size(); ++i) {
            if (rel && comp.in_stratum[static_cast<size_t>(j)][i]) continue;
            out.push_back(c.sp_offset[static_cast<size_t>(j)][ci] + static_cast<int>(i));
        }
    }
    return out;
}

// The purely spatial coboundary: the t = 0 vertex block of the spacetime
// coboundary is exactly the spatial one, in matching coordinates.
inline RationalMatrix spatial_coboundary_matrix(const SpacetimeComplex& c, int j, bool rel) {
    if (j < 0 || j > c.m - 1)
        throw DegreeMismatch("spatial_coboundary_matrix: degree outside 0.." +
                             std::to_string(c.m - 1));
    int nrows = (j + 1 <= c.m - 1) ? c.sp_total[static_cast<size_t>(j) + 1] : 0;
    int ncols = c.sp_total[static_cast<size_t>(j)];
    RationalMatrix full(nrows, ncols);
    if (j < c.m - 1) {
        const RationalMatrix& d = c.d_full[static_cast<size_t>(j)];
        for (int r = 0; r < nrows; ++r)
            for (const auto& [col, v] : d.row[static_cast<size_t>(r)].terms) {
                if (col >= ncols) break;
                full.set(r, col, v);
            }
    }
    if (!rel) return full;
    std::vector<int> rows = spatial_cells(c, j + 1, true), cols = spatial_cells(c, j, true);
    if (j + 1 > c.m - 1) rows.clear();
    return submatrix(full, rows, cols);
}

struct SpatialCohomology {
    ComplexPtr complex;
    int degree = 0;
    bool rel = false;
    std::vector<int> cells;
    std::vector<SpatialCochain> representatives;
    QuotientMap classes;

    int dim() const { return classes.dim(); }

    std::vector<Rat> coordinates(const SpatialCochain& phi) const {
        if (phi.complex->uid != complex->uid)
            throw ComplexMismatch("spatial cohomology coordinates: different complex");
        if (phi.degree != degree)
            throw DegreeMismatch("spatial cohomology coordinates: wrong degree");
        SparseVec local;
        size_t pos = 0;
        for (const auto& [gid, v] : phi.values.terms) {
            while (pos < cells.size() && cells[pos] < gid) ++pos;
            if (pos == cells.size() || cells[pos] != gid)
                throw ValidationError("spatial cohomology coordinates: value outside the world");
            local.terms.push_back({static_cast<int>(pos), v});
        }
        return classes.coords(local);
    }
};

inline SpatialCohomology spatial_cohomology(const ComplexPtr& c, int j, bool rel) {
    if (j < 0) { // the zero space below degree 0
        SpatialCohomology out;
        out.complex = c;
        out.degree = j;
        out.rel = rel;
        out.classes = quotient_coordinates(span_of(0, {}), span_of(0, {}));
        return out;
    }
    std::vector<int> cells = spatial_cells(*c, j, rel);
    int n = static_cast<int>(cells.size());
    RationalMatrix up = spatial_coboundary_matrix(*c, j, rel);
    Subspace closed = (j < c->m - 1) ? kernel_basis(up) : full_space(n);
    Subspace exact =
        (j > 0) ? image_basis(spatial_coboundary_matrix(*c, j - 1, rel)) : span_of(n, {});

    SpatialCohomology out;
    out.complex = c;
    out.degree = j;
    out.rel = rel;
    out.cells = std::move(cells);
    out.classes = quotient_coordinates(exact, closed);
    for (const SparseVec& rep : out.classes.reps) {
        SpatialCochain r{c, j, {}};
        for (const auto& [i, v] : rep.terms)
            r.values.terms.push_back({out.cells[static_cast<size_t>(i)], v});
        std::sort(r.values.terms.begin(), r.values.terms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        out.representatives.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Induced cohomology maps of the toolkit
// ---------------------------------------------------------------------------

// H^k_tc(spacetime) -> H^{k-1}(space), induced by time integration.
inline RationalMatrix time_integration_map(const ComplexPtr& c, int k) {
    CohomologySpace src = cohomology(c, k, supp_tc, Flavor::d);
    SpatialCohomology dst = spatial_cohomology(c, k - 1, false);
    RationalMatrix out(dst.dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
        std::vector<Rat> col = dst.coordinates(time_integration(src.representatives[static_cast<size_t>(j)]));
        for (int i = 0; i < dst.dim(); ++i)
            if (col[static_cast<size_t>(i)] != 0) out.set(i, j, col[static_cast<size_t>(i)]);
    }
    return out;
}

// H^{k-1}(space) -> H^k_tc(spacetime), induced by time extension.
inline RationalMatrix time_extension_map(const ComplexPtr& c, int k, const TimeProfile& a) {
    SpatialCohomology src = spatial_cohomology(c, k - 1, false);
    CohomologySpace dst = cohomology(c, k, supp_tc, Flavor::d);
    RationalMatrix out(dst.dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
        std::vector<Rat> col = dst.coordinates(time_extension(src.representatives[static_cast<size_t>(j)], a));
        for (int i = 0; i < dst.dim(); ++i)
            if (col[static_cast<size_t>(i)] != 0) out.set(i, j, col[static_cast<size_t>(i)]);
    }
    return out;
}

// H^k_sc(spacetime) -> H^k_rel(space), induced by slice restriction.
inline RationalMatrix slice_map(const ComplexPtr& c, int k, int base_t = -1) {
    CohomologySpace src = cohomology(c, k, supp_sc, Flavor::d);
    SpatialCohomology dst = spatial_cohomology(c, k <= c->m - 1 ? k : -1, true);
    RationalMatrix out(dst.dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
        std::vector<Rat> col =
            dst.coordinates(slice_restriction(src.representatives[static_cast<size_t>(j)], base_t));
        for (int i = 0; i < dst.dim(); ++i)
            if (col[static_cast<size_t>(i)] != 0) out.set(i, j, col[static_cast<size_t>(i)]);
    }
    return out;
}

// H^k_rel(space) -> H^k_sc(spacetime), induced by constant extension.
inline RationalMatrix constant_extension_map(const ComplexPtr& c, int k) {
    SpatialCohomology src = spatial_cohomology(c, k <= c->m - 1 ? k : -1, true);
    CohomologySpace dst = cohomology(c, k, supp_sc, Flavor::d);
    RationalMatrix out(dst.dim(), src.dim());
    for (int j = 0; j < src.dim(); ++j) {
        std::vector<Rat> col =
            dst.coordinates(constant_extension(src.representatives[static_cast<size_t>(j)]));
        for (int i = 0; i < dst.dim(); ++i)
            if (col[static_cast<size_t>(i)] != 0) out.set(i, j, col[static_cast<size_t>(i)]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Duality pairing matrices
// ---------------------------------------------------------------------------

enum class DualityPair { CompactVsFree, ScVsTc };

inline std::string duality_pair_name(DualityPair p) {
    return p == DualityPair::CompactVsFree ? "c-vs-free" : "sc-vs-tc";
}

// For flavors (d, d) this is the wedge pairing between complementary degrees;
// with one delta flavor it is the metric pairing in equal degree. Two delta
// flavors never pair.
inline RationalMatrix duality_pairing_matrix(const ComplexPtr& c, int k, DualityPair pair,
                                             Flavor left, Flavor right) {
    if (k < 0 || k > c->m) throw DegreeMismatch("duality_pairing_matrix: bad degree");
    SupportSystem A = (pair == DualityPair::CompactVsFree) ? supp_c : supp_sc;
    SupportSystem B = complement(A);
    if (left == Flavor::delta && right == Flavor::delta)
        throw ValidationError(
            "duality_pairing_matrix: at most one side may carry the codifferential flavor");

    CohomologySpace L, R;
    bool wedge = (left == Flavor::d && right == Flavor::d);
    L = cohomology(c, k, A, left);
    R = cohomology(c, wedge ? c->m - k : k, B, right);

    RationalMatrix out(L.dim(), R.dim());
    for (int i = 0; i < L.dim(); ++i)
        for (int j = 0; j < R.dim(); ++j) {
            Rat v = wedge ? wedge_pairing(L.representatives[static_cast<size_t>(i)],
                                          R.representatives[static_cast<size_t>(j)])
                          : metric_pairing(L.representatives[static_cast<size_t>(i)],
                                           R.representatives[static_cast<size_t>(j)]);
            if (v != 0) out.set(i, j, v);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Integer degree-1 cohomology lattice
// ---------------------------------------------------------------------------

struct IntegerCohomologyLattice {
    CohomologySpace rational; // H^1, unrestricted, flavor d
    IntegerLattice lattice;   // classes of integer cocycles in rational class coords
};

inline IntegerCohomologyLattice integer_h1(const ComplexPtr& c) {
    IntegerCohomologyLattice out;
    out.rational = cohomology(c, 1, supp_unrestricted, Flavor::d);
    int r = out.rational.dim();

    IntMatrix d1 = int_mat_from_rational(c->d_full[1]);
    IntMatrix d0 = int_mat_from_rational(c->d_full[0]);
    SnfResult s1 = smith_normal_form(d1);
    int n1 = d1.cols;
    int kappa = n1 - s1.rank;

    // integer coordinates of the image of d0 in the cocycle lattice basis
    // (the trailing columns of s1.v)
    IntMatrix rel(kappa, d0.cols);
    for (int j = 0; j < d0.cols; ++j) {
        for (int i = 0; i < kappa; ++i) {
            Int acc(0);
            for (int l = 0; l < n1; ++l)
                acc += s1.v_inv.at(s1.rank + i, l) * d0.at(l, j);
            rel.at(i, j) = acc;
        }
    }

    SnfResult s2 = smith_normal_form(rel);
    for (int i = 0; i < s2.rank; ++i)
        if (s2.divisors[static_cast<size_t>(i)] != 1)
            throw TorsionDetected("integer degree-1 cohomology has a torsion factor Z/" +
                                  int_to_string(s2.divisors[static_cast<size_t>(i)]));

    if (kappa - s2.rank != r)
        throw Error("integer_h1: free rank " + std::to_string(kappa - s2.rank) +
                    " disagrees with rational dimension " + std::to_string(r));

    std::vector<SparseVec> gens;
    for (int g = s2.rank; g < kappa; ++g) {
        // integer cocycle representing the g-th free generator class
        SparseVec z;
        for (int l = 0; l < n1; ++l) {
            Int acc(0);
            for (int i = 0; i < kappa; ++i)
                acc += s1.v.at(l, s1.rank + i) * s2.u_inv.at(i, g);
            if (acc != 0) z.terms.push_back({l, Rat(acc)});
        }
        std::vector<Rat> coords = out.rational.coordinates(make_cochain(c, 1, z));
        SparseVec cv;
        for (int i = 0; i < r; ++i)
            if (coords[static_cast<size_t>(i)] != 0) cv.terms.push_back({i, coords[static_cast<size_t>(i)]});
        gens.push_back(std::move(cv));
    }
    out.lattice = lattice_from_generators(r, gens);
    if (static_cast<int>(out.lattice.basis.size()) != r)
        throw Error("integer_h1: lattice rank disagrees with rational dimension");
    return out;
}

} // namespace gaugeloc
