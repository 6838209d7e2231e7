#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gaugeloc/cohomology.hpp>
#include <gaugeloc/complex.hpp>
#include <gaugeloc/matrix.hpp>

namespace gaugeloc {

// ---------------------------------------------------------------------------
// The discrete wave operator and its exact retarded/advanced inverses.
//
// The window is a chunk of a spacetime that extends forever in time:
// identities are certified away from the first and last time slices (the
// margin). The operator can be built over a support world: on the
// unrestricted world the spatial boundary strata are artifacts of the finite
// window and sources whose causal shadow would reach them are refused; on the
// space-compact world the strata act as genuine reflecting walls and the
// dynamics is exact everywhere off them.
// ---------------------------------------------------------------------------

namespace detail {

// time level at which a cell's value becomes known during forward marching
inline int cell_level(const SpacetimeComplex& X, int k, int gid) {
    int ub = X.u_block(k);
    if (gid < ub) return gid / X.sp_total[static_cast<size_t>(k)];
    int nw = X.sp_total[static_cast<size_t>(k) - 1];
    return (gid - ub) / nw + 1;
}

struct MarchPlan {
    // unknown columns and solving rows per level (world indices), and the
    // coupling block inverse data (diagonal fast path, dense inverse else)
    std::vector<std::vector<int>> cols, rows;
    std::vector<bool> diagonal;
    std::vector<std::vector<Rat>> diag_inv;
    std::vector<RationalMatrix> dense_inv;
};

inline RationalMatrix invert_square(const RationalMatrix& b, const std::string& what) {
    ColumnSolver solver(b);
    RationalMatrix inv(b.cols, b.rows);
    for (int i = 0; i < b.rows; ++i) {
        auto x = solver.solve(sv_unit(i));
        if (!x) throw NonHyperbolic(what + " is singular");
        for (const auto& [j, v] : x->terms) inv.set(j, i, v);
    }
    return inv;
}

inline MarchPlan build_plan(const SpacetimeComplex& X, int k, const std::vector<int>& cells,
                            const RationalMatrix& box, const std::string& direction) {
    int T = X.T();
    int ub = X.u_block(k);
    int n = static_cast<int>(cells.size());

    MarchPlan plan;
    plan.cols.assign(static_cast<size_t>(T) + 1, {});
    plan.rows.assign(static_cast<size_t>(T) + 1, {});
    for (int i = 0; i < n; ++i) {
        int gid = cells[static_cast<size_t>(i)];
        bool is_u = gid < ub;
        int slice = is_u ? gid / std::max(1, X.sp_total[static_cast<size_t>(k)])
                         : (gid - ub) / std::max(1, X.sp_total[static_cast<size_t>(k) - 1]);
        int level = is_u ? slice : slice + 1;
        if (level >= 2) plan.cols[static_cast<size_t>(level)].push_back(i);
        int row_level = is_u ? slice + 1 : slice + 2;
        bool row_used = is_u ? (slice >= 1 && slice <= T - 1) : (slice >= 0 && slice <= T - 2);
        if (row_used && row_level >= 2 && row_level <= T)
            plan.rows[static_cast<size_t>(row_level)].push_back(i);
    }

    plan.diagonal.assign(static_cast<size_t>(T) + 1, true);
    plan.diag_inv.assign(static_cast<size_t>(T) + 1, {});
    plan.dense_inv.assign(static_cast<size_t>(T) + 1, RationalMatrix(0, 0));
    for (int level = 2; level <= T; ++level) {
        const auto& rows = plan.rows[static_cast<size_t>(level)];
        const auto& cols = plan.cols[static_cast<size_t>(level)];
        if (rows.size() != cols.size())
            throw NonHyperbolic("time-marching rows and unknowns mismatch at slice " +
                                std::to_string(level) + " (" + direction + ")");
        if (rows.empty()) continue;
        std::vector<int> col_pos(static_cast<size_t>(n), -1);
        for (size_t i = 0; i < cols.size(); ++i) col_pos[static_cast<size_t>(cols[i])] = static_cast<int>(i);

        // certificate: no row may reference a level above the one it solves
        RationalMatrix block(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
        for (size_t r = 0; r < rows.size(); ++r)
            for (const auto& [c, v] : box.row[static_cast<size_t>(rows[r])].terms) {
                int lc = cell_level(X, k, cells[static_cast<size_t>(c)]);
                if (lc > level)
                    throw NonHyperbolic("wave operator references slice " + std::to_string(lc) +
                                        " from a row of slice " + std::to_string(level) + " (" +
                                        direction + ")");
                if (lc == level) {
                    int p = col_pos[static_cast<size_t>(c)];
                    if (p < 0)
                        throw NonHyperbolic("unexpected unknown at slice " + std::to_string(level) +
                                            " (" + direction + ")");
                    block.set(static_cast<int>(r), p, v);
                }
            }

        bool diag = true;
        for (int r = 0; r < block.rows && diag; ++r)
            for (const auto& [c, v] : block.row[static_cast<size_t>(r)].terms)
                if (c != r) { diag = false; break; }
        if (diag) {
            std::vector<Rat> inv(rows.size());
            for (size_t r = 0; r < rows.size(); ++r) {
                Rat v = block.at(static_cast<int>(r), static_cast<int>(r));
                if (v == 0) {
                    bool vertex_row = cells[static_cast<size_t>(rows[r])] < ub;
                    throw NonHyperbolic("time-coupling block singular at slice " +
                                        std::to_string(level) + ", " +
                                        (vertex_row ? std::string("vertex-type")
                                                    : std::string("edge-type")) +
                                        " block (" + direction + ")");
                }
                inv[r] = Rat(1) / v;
            }
            plan.diag_inv[static_cast<size_t>(level)] = std::move(inv);
        } else {
            plan.diagonal[static_cast<size_t>(level)] = false;
            plan.dense_inv[static_cast<size_t>(level)] = invert_square(
                block, "time-coupling block at slice " + std::to_string(level) + " (" + direction + ")");
        }
    }
    return plan;
}

} // namespace detail

struct DAlembertOperator {
    ComplexPtr complex;
    int degree = 0;
    SupportSystem world = supp_unrestricted; // cells the dynamics runs over
    std::vector<int> cells;                  // world cells, ascending global ids
    std::vector<int> index_of;               // global id -> world index, or -1
    RationalMatrix box;                      // wave operator over world indices
    int margin = 2;                          // certified band for composite identities
    bool hyperbolic = true;                  // marching certificate computed at build

    std::vector<int> mirror;                 // time-reversal involution, world indices
    RationalMatrix box_mirrored;
    detail::MarchPlan forward, backward;

    // spatial adjacency of the stencil per cell type, for shadow tracking
    std::vector<std::vector<int>> adj_u, adj_w;
};

namespace detail {

// adjacency of spatial cells induced by the stencil's same-slice couplings
inline void stencil_adjacency(const SpacetimeComplex& X, int k, const DAlembertOperator& op,
                              std::vector<std::vector<int>>& adj_u,
                              std::vector<std::vector<int>>& adj_w) {
    int T = X.T();
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    adj_u.assign(static_cast<size_t>(nu), {});
    adj_w.assign(static_cast<size_t>(nw), {});
    auto connect = [](std::vector<std::vector<int>>& adj, int a, int b) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    };
    int tu = (T >= 2) ? 1 : 0;
    int tw = (T >= 3) ? 1 : 0;
    for (size_t i = 0; i < op.cells.size(); ++i) {
        int gid = op.cells[i];
        bool is_u = gid < ub;
        int slice = is_u ? gid / std::max(1, nu) : (gid - ub) / std::max(1, nw);
        if (is_u ? slice != tu : slice != tw) continue;
        int s = is_u ? gid % nu : (gid - ub) % nw;
        for (const auto& [c, v] : op.box.row[i].terms) {
            (void)v;
            int cg = op.cells[static_cast<size_t>(c)];
            if (is_u && cg < ub) connect(adj_u, s, cg % nu);
            if (!is_u && cg >= ub) connect(adj_w, s, (cg - ub) % nw);
        }
    }
    for (auto& l : adj_u) { std::sort(l.begin(), l.end()); l.erase(std::unique(l.begin(), l.end()), l.end()); }
    for (auto& l : adj_w) { std::sort(l.begin(), l.end()); l.erase(std::unique(l.begin(), l.end()), l.end()); }
}

} // namespace detail

inline DAlembertOperator build_dalembert(const ComplexPtr& c, int k,
                                         const SupportSystem& world = supp_unrestricted) {
    if (k < 0 || k > c->m)
        throw DegreeMismatch("build_dalembert: degree outside 0.." + std::to_string(c->m));
    DAlembertOperator op;
    op.complex = c;
    op.degree = k;
    op.world = world;
    op.cells = allowed_cells(*c, k, world);
    op.index_of.assign(static_cast<size_t>(c->n_cells[static_cast<size_t>(k)]), -1);
    for (size_t i = 0; i < op.cells.size(); ++i)
        op.index_of[static_cast<size_t>(op.cells[i])] = static_cast<int>(i);

    int n = static_cast<int>(op.cells.size());
    RationalMatrix box(n, n);
    if (k < c->m)
        box = mat_mul(codifferential_matrix(*c, k + 1, world), coboundary_matrix(*c, k, world));
    if (k > 0)
        box = mat_add(box, mat_mul(coboundary_matrix(*c, k - 1, world),
                                   codifferential_matrix(*c, k, world)));
    op.box = std::move(box);

    int T = c->T();
    int ub = c->u_block(k);
    int nu = (k < c->m) ? c->sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? c->sp_total[static_cast<size_t>(k) - 1] : 0;
    op.mirror.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        int gid = op.cells[static_cast<size_t>(i)];
        int mg = (gid < ub) ? (T - gid / nu) * nu + gid % nu
                            : ub + (T - 1 - (gid - ub) / nw) * nw + (gid - ub) % nw;
        int mi = op.index_of[static_cast<size_t>(mg)];
        if (mi < 0) throw Error("build_dalembert: support world is not time-symmetric");
        op.mirror[static_cast<size_t>(i)] = mi;
    }
    RationalMatrix mbox(n, n);
    for (int r = 0; r < n; ++r)
        for (const auto& [cc, v] : op.box.row[static_cast<size_t>(r)].terms)
            mbox.set(op.mirror[static_cast<size_t>(r)], op.mirror[static_cast<size_t>(cc)], v);
    op.box_mirrored = std::move(mbox);

    op.forward = detail::build_plan(*c, k, op.cells, op.box, "retarded");
    op.backward = detail::build_plan(*c, k, op.cells, op.box_mirrored, "advanced");
    detail::stencil_adjacency(*c, k, op, op.adj_u, op.adj_w);
    op.hyperbolic = true;
    return op;
}

namespace detail {

inline void check_margin(const DAlembertOperator& op, const Cochain& f, bool bottom, bool top,
                         int margin, const std::string& what) {
    const SpacetimeComplex& X = *op.complex;
    int T = X.T();
    int k = op.degree;
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    for (const auto& [gid, v] : f.values.terms) {
        (void)v;
        int t, lo, hi;
        if (gid < ub) { t = gid / nu; lo = margin; hi = T - margin; }
        else { t = (gid - ub) / nw; lo = margin; hi = T - 1 - margin; }
        if ((bottom && t < lo) || (top && t > hi))
            throw MarginViolation(what + ": source is nonzero inside the margin at " +
                                  describe_cell(X, k, gid));
    }
}

// step the shadow through the window; on the unrestricted world, refuse if it
// reaches a boundary stratum (there the walls are window artifacts)
struct Shadow {
    std::vector<std::vector<bool>> u, w; // [slice][spatial gid]
};

inline void grow(std::vector<bool>& s, const std::vector<std::vector<int>>& adj) {
    std::vector<bool> next = s;
    for (size_t i = 0; i < s.size(); ++i)
        if (s[i])
            for (int j : adj[i]) next[static_cast<size_t>(j)] = true;
    s = std::move(next);
}

inline Shadow trace_shadow(const DAlembertOperator& op, const Cochain& f, bool fwd, bool bwd,
                           const std::string& what) {
    const SpacetimeComplex& X = *op.complex;
    int T = X.T();
    int k = op.degree;
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;

    std::vector<std::vector<bool>> fu(static_cast<size_t>(T) + 1, std::vector<bool>(static_cast<size_t>(nu), false));
    std::vector<std::vector<bool>> fw(static_cast<size_t>(T), std::vector<bool>(static_cast<size_t>(nw), false));
    for (const auto& [gid, v] : f.values.terms) {
        (void)v;
        if (gid < ub) fu[static_cast<size_t>(gid / nu)][static_cast<size_t>(gid % nu)] = true;
        else fw[static_cast<size_t>((gid - ub) / nw)][static_cast<size_t>((gid - ub) % nw)] = true;
    }

    Shadow sh;
    sh.u.assign(static_cast<size_t>(T) + 1, std::vector<bool>(static_cast<size_t>(nu), false));
    sh.w.assign(static_cast<size_t>(T), std::vector<bool>(static_cast<size_t>(nw), false));
    auto merge = [](std::vector<bool>& a, const std::vector<bool>& b) {
        for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] || b[i];
    };
    if (fwd) {
        std::vector<bool> su(static_cast<size_t>(nu), false), sw(static_cast<size_t>(nw), false);
        for (int t = 0; t <= T; ++t) {
            if (t > 0) { grow(su, op.adj_u); grow(sw, op.adj_w); }
            merge(su, fu[static_cast<size_t>(t)]);
            if (t < T) merge(sw, fw[static_cast<size_t>(t)]);
            merge(sh.u[static_cast<size_t>(t)], su);
            if (t < T) merge(sh.w[static_cast<size_t>(t)], sw);
        }
    }
    if (bwd) {
        std::vector<bool> su(static_cast<size_t>(nu), false), sw(static_cast<size_t>(nw), false);
        for (int t = T; t >= 0; --t) {
            if (t < T) { grow(su, op.adj_u); grow(sw, op.adj_w); }
            merge(su, fu[static_cast<size_t>(t)]);
            if (t > 0) merge(sw, fw[static_cast<size_t>(t) - 1]);
            merge(sh.u[static_cast<size_t>(t)], su);
            if (t > 0) merge(sh.w[static_cast<size_t>(t) - 1], sw);
        }
    }

    if (op.world.space_flag == Flag::Free) {
        const auto& strat = X.space_stratum[static_cast<size_t>(k)];
        for (size_t t = 0; t < sh.u.size(); ++t)
            for (size_t s = 0; s < sh.u[t].size(); ++s)
                if (sh.u[t][s]) {
                    int gid = static_cast<int>(t) * nu + static_cast<int>(s);
                    if (strat[static_cast<size_t>(gid)])
                        throw ShadowOverflow(what + ": causal shadow reaches the spatial boundary at " +
                                             describe_cell(X, k, gid));
                }
        for (size_t j = 0; j < sh.w.size(); ++j)
            for (size_t s = 0; s < sh.w[j].size(); ++s)
                if (sh.w[j][s]) {
                    int gid = ub + static_cast<int>(j) * nw + static_cast<int>(s);
                    if (strat[static_cast<size_t>(gid)])
                        throw ShadowOverflow(what + ": causal shadow reaches the spatial boundary at " +
                                             describe_cell(X, k, gid));
                }
    }
    return sh;
}

inline Cochain march(const DAlembertOperator& op, const MarchPlan& plan, const RationalMatrix& box,
                     const Cochain& f, const SparseVec* seed = nullptr) {
    const SpacetimeComplex& X = *op.complex;
    int n = static_cast<int>(op.cells.size());
    std::vector<Rat> x(static_cast<size_t>(n), Rat(0)), fd(static_cast<size_t>(n), Rat(0));
    for (const auto& [gid, v] : f.values.terms)
        fd[static_cast<size_t>(op.index_of[static_cast<size_t>(gid)])] = v;
    if (seed)
        for (const auto& [gid, v] : seed->terms)
            x[static_cast<size_t>(op.index_of[static_cast<size_t>(gid)])] = v;

    for (int level = 2; level <= X.T(); ++level) {
        const auto& rows = plan.rows[static_cast<size_t>(level)];
        const auto& cols = plan.cols[static_cast<size_t>(level)];
        if (rows.empty()) continue;
        std::vector<Rat> r(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            Rat acc = fd[static_cast<size_t>(rows[i])];
            for (const auto& [cc, v] : box.row[static_cast<size_t>(rows[i])].terms)
                if (x[static_cast<size_t>(cc)] != 0) acc -= v * x[static_cast<size_t>(cc)];
            r[i] = std::move(acc);
        }
        if (plan.diagonal[static_cast<size_t>(level)]) {
            const auto& di = plan.diag_inv[static_cast<size_t>(level)];
            for (size_t i = 0; i < cols.size(); ++i) x[static_cast<size_t>(cols[i])] = r[i] * di[i];
        } else {
            const RationalMatrix& inv = plan.dense_inv[static_cast<size_t>(level)];
            for (int i = 0; i < inv.rows; ++i) {
                Rat acc(0);
                for (const auto& [cc, v] : inv.row[static_cast<size_t>(i)].terms) acc += v * r[static_cast<size_t>(cc)];
                x[static_cast<size_t>(cols[static_cast<size_t>(i)])] = std::move(acc);
            }
        }
    }

    Cochain out{op.complex, op.degree, {}};
    for (int i = 0; i < n; ++i)
        if (x[static_cast<size_t>(i)] != 0)
            out.values.terms.push_back({op.cells[static_cast<size_t>(i)], x[static_cast<size_t>(i)]});
    return out;
}

inline Cochain apply_mirror(const DAlembertOperator& op, const Cochain& f) {
    Cochain out{f.complex, f.degree, {}};
    for (const auto& [gid, v] : f.values.terms) {
        int i = op.index_of[static_cast<size_t>(gid)];
        out.values.terms.push_back({op.cells[static_cast<size_t>(op.mirror[static_cast<size_t>(i)])], v});
    }
    std::sort(out.values.terms.begin(), out.values.terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

inline void check_source(const DAlembertOperator& op, const Cochain& f, const std::string& what) {
    if (f.complex->uid != op.complex->uid)
        throw ComplexMismatch(what + ": source lives on a different complex");
    if (f.degree != op.degree) throw DegreeMismatch(what + ": source degree mismatch");
    require_support(f, op.world, what);
}

} // namespace detail

// Retarded inverse: vanishes strictly before the earliest source slice and
// satisfies box(G+ f) = f away from the final slice band.
inline Cochain retarded(const DAlembertOperator& op, const Cochain& f) {
    detail::check_source(op, f, "retarded");
    detail::check_margin(op, f, true, false, 1, "retarded");
    detail::trace_shadow(op, f, true, false, "retarded");
    return detail::march(op, op.forward, op.box, f);
}

inline Cochain advanced(const DAlembertOperator& op, const Cochain& f) {
    detail::check_source(op, f, "advanced");
    detail::check_margin(op, f, false, true, 1, "advanced");
    detail::trace_shadow(op, f, false, true, "advanced");
    return detail::apply_mirror(op, detail::march(op, op.backward, op.box_mirrored,
                                                  detail::apply_mirror(op, f)));
}

// G = G+ - G-, defined on sources compact within the margins.
inline Cochain causal_propagator(const DAlembertOperator& op, const Cochain& f) {
    detail::check_source(op, f, "causal_propagator");
    detail::check_margin(op, f, true, true, 1, "causal_propagator");
    detail::trace_shadow(op, f, true, true, "causal_propagator");
    Cochain plus = detail::march(op, op.forward, op.box, f);
    Cochain minus = detail::apply_mirror(op, detail::march(op, op.backward, op.box_mirrored,
                                                           detail::apply_mirror(op, f)));
    return Cochain{op.complex, op.degree, sv_sub(plus.values, minus.values)};
}

// Apply the wave operator of `op` to a cochain supported on its world.
inline Cochain apply_box(const DAlembertOperator& op, const Cochain& f) {
    detail::check_source(op, f, "apply_box");
    SparseVec packed;
    for (const auto& [gid, v] : f.values.terms)
        packed.terms.push_back({op.index_of[static_cast<size_t>(gid)], v});
    SparseVec out = mat_vec(op.box, packed);
    SparseVec unpacked;
    for (const auto& [i, v] : out.terms)
        unpacked.terms.push_back({op.cells[static_cast<size_t>(i)], v});
    return Cochain{op.complex, op.degree, unpacked};
}

// Cells at least `margin` slices away from both window ends.
inline std::vector<int> margin_cells(const SpacetimeComplex& X, int k, int margin) {
    int T = X.T();
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    std::vector<int> out;
    for (int t = margin; t <= T - margin; ++t)
        for (int s = 0; s < nu; ++s) out.push_back(t * nu + s);
    for (int j = margin; j <= T - 1 - margin; ++j)
        for (int s = 0; s < nw; ++s) out.push_back(ub + j * nw + s);
    std::sort(out.begin(), out.end());
    return out;
}

// World cells of `op` at least `margin` slices from both window ends.
inline std::vector<int> margin_world_cells(const DAlembertOperator& op, int margin) {
    const SpacetimeComplex& X = *op.complex;
    int k = op.degree, T = X.T(), ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    std::vector<int> out;
    for (int gid : op.cells) {
        int t = (gid < ub) ? gid / nu : (gid - ub) / nw;
        int hi = (gid < ub) ? T - margin : T - 1 - margin;
        if (t >= margin && t <= hi) out.push_back(gid);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact-sequence bookkeeping:  0 -> C_c -> C_c -> C_sc -> C_sc -> 0 with
// arrows box, G, box — realized on the margin bands of the window.
// ---------------------------------------------------------------------------

struct ExactSequenceReport {
    int degree = 0;
    int dim_compact2 = 0, dim_compact3 = 0; // sizes of the margin worlds
    int dim_ker_box = 0;                    // kernel of box on the margin-2 world
    int dim_ker_g = 0;                      // kernel of G on the margin-2 world
    int dim_im_box = 0;                     // image of box from the margin-3 world
    bool kernel_matches_image = false;      // ker G = box(margin-3), exactly
    int onto_trials = 0, onto_hits = 0;     // constructive surjectivity onto ker box
    bool exact = false;
};

inline ExactSequenceReport verify_exact_sequence(const DAlembertOperator& op, int trials = 5,
                                                 unsigned seed = 12345) {
    const SpacetimeComplex& X = *op.complex;
    const ComplexPtr& c = op.complex;
    int k = op.degree;
    int T = X.T();
    int n = static_cast<int>(op.cells.size());

    auto to_world = [&](const std::vector<int>& gids) {
        std::vector<int> out;
        for (int g : gids) out.push_back(op.index_of[static_cast<size_t>(g)]);
        return out;
    };
    std::vector<int> m2 = margin_world_cells(op, 2), m3 = margin_world_cells(op, 3);
    std::vector<int> m2w = to_world(m2), m3w = to_world(m3);
    std::vector<int> all_rows(static_cast<size_t>(n));
    for (size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = static_cast<int>(i);

    ExactSequenceReport rep;
    rep.degree = k;
    rep.dim_compact2 = static_cast<int>(m2.size());
    rep.dim_compact3 = static_cast<int>(m3.size());

    // injectivity of box on compactly supported cochains
    rep.dim_ker_box = kernel_basis(submatrix(op.box, all_rows, m2w)).dim();

    // G as a matrix on the margin-2 world
    RationalMatrix g(n, static_cast<int>(m2.size()));
    for (size_t j = 0; j < m2.size(); ++j) {
        Cochain col = causal_propagator(op, make_cochain(c, k, sv_unit(m2[j])));
        for (const auto& [gid, v] : col.values.terms)
            g.set(op.index_of[static_cast<size_t>(gid)], static_cast<int>(j), v);
    }
    Subspace kerg = kernel_basis(g);
    rep.dim_ker_g = kerg.dim();

    // box applied to the margin-3 world lands in the margin-2 world
    RationalMatrix box_m3 = submatrix(op.box, m2w, m3w);
    {
        std::vector<bool> inm2(static_cast<size_t>(n), false);
        for (int i : m2w) inm2[static_cast<size_t>(i)] = true;
        std::vector<int> outside;
        for (int i = 0; i < n; ++i)
            if (!inm2[static_cast<size_t>(i)]) outside.push_back(i);
        if (!submatrix(op.box, outside, m3w).is_zero())
            throw Error("verify_exact_sequence: box does not map the margin-3 world into margin-2");
    }
    Subspace im = image_basis(box_m3);
    rep.dim_im_box = im.dim();

    // subspace equality ker G = im box: containment plus equal dimensions
    bool contained = true;
    for (const SparseVec& v : im.basis)
        if (!kerg.contains(v)) { contained = false; break; }
    rep.kernel_matches_image = contained && rep.dim_ker_g == rep.dim_im_box;

    // constructive surjectivity: every marched solution is G of a cut source
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick(-3, 3);
    int ub = X.u_block(k);
    int nu = (k < X.m) ? X.sp_total[static_cast<size_t>(k)] : 0;
    int nw = (k > 0) ? X.sp_total[static_cast<size_t>(k) - 1] : 0;
    int cut = T / 2;
    for (int trial = 0; trial < trials; ++trial) {
        // random solution of the interior equations, seeded at the bottom:
        // marching the homogeneous system from nonzero initial data fills in
        // the unique solution through the rest of the window
        SparseVec seedv;
        for (int gid : op.cells) {
            bool is_seed = (gid < ub) ? gid / nu <= 1 : (gid - ub) / nw == 0;
            if (!is_seed) continue;
            int v = pick(rng);
            if (v != 0) sv_set(seedv, gid, rat(v));
        }
        Cochain x = detail::march(op, op.forward, op.box, Cochain{c, k, {}}, &seedv);

        // cut above the middle slice and take the wave operator of the cut
        SparseVec ys;
        for (const auto& [gid, v] : x.values.terms) {
            int t = (gid < ub) ? gid / nu : (gid - ub) / nw;
            if (t >= cut) ys.terms.push_back({gid, v});
        }
        SparseVec fs = apply_box(op, Cochain{c, k, ys}).values;
        // drop the final-band rows, where the window stencil is truncated
        SparseVec fclean;
        for (const auto& [gid, v] : fs.terms) {
            bool topu = (gid < ub) && gid / nu == T;
            bool topw = (gid >= ub) && (gid - ub) / nw == T - 1;
            if (!topu && !topw) fclean.terms.push_back({gid, v});
        }
        Cochain f{c, k, fclean};
        rep.onto_trials++;
        Cochain gx = causal_propagator(op, f);
        if (gx.values == x.values) rep.onto_hits++;
    }

    rep.exact = rep.dim_ker_box == 0 && rep.kernel_matches_image && rep.onto_hits == rep.onto_trials;
    return rep;
}

// ---------------------------------------------------------------------------
// Naturality along an embedding: push the source, propagate, pull back
// ---------------------------------------------------------------------------

inline bool green_naturality(const Embedding& e, int k, const Cochain& f, bool use_retarded) {
    if (e.source->time.spacing != e.target->time.spacing)
        throw ValidationError("green_naturality: time spacings differ");
    for (size_t ci = 0; ci < e.source->comps.size(); ++ci) {
        const SpatialComponent& sc = e.source->comps[ci];
        const SpatialComponent& tc = e.target->comps[static_cast<size_t>(e.maps[ci].target_comp)];
        for (int a = 0; a < sc.dim(); ++a)
            if (sc.axes[static_cast<size_t>(a)].spacing != tc.axes[static_cast<size_t>(a)].spacing)
                throw ValidationError("green_naturality: spatial spacings differ on axis " +
                                      std::to_string(a));
    }

    DAlembertOperator op_src = build_dalembert(e.source, k);
    DAlembertOperator op_tgt = build_dalembert(e.target, k);
    Cochain pushed = pushforward(e, f, supp_c);

    // within the compared time window, the target-side shadow must stay
    // inside the image of the embedding (outside the image the source has no
    // cells, so the two marches would read different stencils)
    detail::Shadow sh = detail::trace_shadow(op_tgt, pushed, use_retarded, !use_retarded,
                                             "green_naturality");
    {
        const SpacetimeComplex& Tg = *e.target;
        int toff = e.maps.empty() ? 0 : e.maps[0].time_offset;
        int Ts = e.source->T();
        auto check = [&](int gid) {
            if (!detail::in_image(e, detail::factor_view(Tg, k, gid)))
                throw ShadowOverflow(
                    "green_naturality: target shadow leaves the embedded image at " +
                    describe_cell(Tg, k, gid));
        };
        if (k < Tg.m)
            for (int t = std::max(0, toff); t <= std::min(Tg.T(), toff + Ts); ++t)
                for (int s = 0; s < static_cast<int>(sh.u[static_cast<size_t>(t)].size()); ++s)
                    if (sh.u[static_cast<size_t>(t)][static_cast<size_t>(s)])
                        check(t * Tg.sp_total[static_cast<size_t>(k)] + s);
        if (k > 0)
            for (int j = std::max(0, toff); j <= std::min(Tg.T() - 1, toff + Ts - 1); ++j)
                for (int s = 0; s < static_cast<int>(sh.w[static_cast<size_t>(j)].size()); ++s)
                    if (sh.w[static_cast<size_t>(j)][static_cast<size_t>(s)])
                        check(Tg.u_block(k) + j * Tg.sp_total[static_cast<size_t>(k) - 1] + s);
    }

    Cochain through = use_retarded ? retarded(op_tgt, pushed) : advanced(op_tgt, pushed);
    Cochain back = pullback(e, through);
    Cochain direct = use_retarded ? retarded(op_src, f) : advanced(op_src, f);
    return back.values == direct.values;
}

} // namespace gaugeloc
