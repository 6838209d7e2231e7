#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <gaugeloc/matrix.hpp>

namespace gaugeloc {

// ---------------------------------------------------------------------------
// Axes and build specs
//
// A spacetime complex is one time axis (an Interval carrying the Lorentzian
// sign) times a spatial complex, which is a disjoint union of axis-product
// components with optional deleted top cells (holes).
// ---------------------------------------------------------------------------

enum class AxisKind { Interval, Circle };

struct AxisSpec {
    AxisKind kind = AxisKind::Interval;
    int n = 1;              // number of edges; Interval has n+1 vertices, Circle has n
    Rat spacing = Rat(1);   // positive
    int signature = +1;     // +1 space, -1 time

    int n_vertices() const { return kind == AxisKind::Interval ? n + 1 : n; }
};

inline AxisSpec time_axis(int n, const Rat& spacing = Rat(1)) {
    return AxisSpec{AxisKind::Interval, n, spacing, -1};
}
inline AxisSpec interval_axis(int n, const Rat& spacing = Rat(1)) {
    return AxisSpec{AxisKind::Interval, n, spacing, +1};
}
inline AxisSpec circle_axis(int n, const Rat& spacing = Rat(1)) {
    return AxisSpec{AxisKind::Circle, n, spacing, +1};
}

struct ComponentSpec {
    std::vector<AxisSpec> axes;                  // spatial axes, signature +1
    std::vector<std::vector<int>> deleted_tops;  // per-axis edge indices of deleted tops
};

struct ComplexSpec {
    AxisSpec time;                      // Interval, signature -1
    std::vector<ComponentSpec> components;
};

// ---------------------------------------------------------------------------
// Packed spatial cell keys
//
// A spatial cell in a component is one factor per axis: a vertex or an edge.
// Keys pack (edge mask, per-axis indices) so that ascending key order equals
// the deterministic enumeration order (mask first, then lexicographic).
// ---------------------------------------------------------------------------

constexpr int kMaxAxes = 4;

struct SpatialCell {
    uint32_t edge_mask = 0;       // bit a set: axis a carries an edge factor
    int idx[kMaxAxes] = {0, 0, 0, 0};
};

inline uint64_t pack_cell(const SpatialCell& c) {
    uint64_t k = static_cast<uint64_t>(c.edge_mask) << 48;
    k |= static_cast<uint64_t>(c.idx[0]) << 36;
    k |= static_cast<uint64_t>(c.idx[1]) << 24;
    k |= static_cast<uint64_t>(c.idx[2]) << 12;
    k |= static_cast<uint64_t>(c.idx[3]);
    return k;
}

inline SpatialCell unpack_cell(uint64_t k) {
    SpatialCell c;
    c.edge_mask = static_cast<uint32_t>(k >> 48);
    c.idx[0] = static_cast<int>((k >> 36) & 0xfff);
    c.idx[1] = static_cast<int>((k >> 24) & 0xfff);
    c.idx[2] = static_cast<int>((k >> 12) & 0xfff);
    c.idx[3] = static_cast<int>(k & 0xfff);
    return c;
}

// ---------------------------------------------------------------------------
// Spatial component tables
// ---------------------------------------------------------------------------

struct SpatialComponent {
    std::vector<AxisSpec> axes;
    std::vector<uint64_t> deleted_tops;          // sorted packed keys (all-edge cells)
    std::vector<std::vector<uint64_t>> cells;    // [deg] -> sorted packed keys of alive cells
    std::vector<std::vector<bool>> in_stratum;   // [deg][local] spatial-boundary stratum flag
    std::vector<std::vector<Rat>> weight;        // [deg][local] product of spacing^{±1}

    int dim() const { return static_cast<int>(axes.size()); }

    int find(int deg, uint64_t key) const {
        const auto& v = cells[static_cast<size_t>(deg)];
        auto it = std::lower_bound(v.begin(), v.end(), key);
        if (it == v.end() || *it != key) return -1;
        return static_cast<int>(it - v.begin());
    }
};

// ---------------------------------------------------------------------------
// Support systems
// ---------------------------------------------------------------------------

enum class Flag { Free, Compact };

struct SupportSystem {
    Flag time_flag = Flag::Free;
    Flag space_flag = Flag::Free;
    bool operator==(const SupportSystem& o) const {
        return time_flag == o.time_flag && space_flag == o.space_flag;
    }
};

inline constexpr SupportSystem supp_unrestricted{Flag::Free, Flag::Free};
inline constexpr SupportSystem supp_tc{Flag::Compact, Flag::Free};
inline constexpr SupportSystem supp_sc{Flag::Free, Flag::Compact};
inline constexpr SupportSystem supp_c{Flag::Compact, Flag::Compact};

inline std::string support_name(const SupportSystem& s) {
    if (s == supp_c) return "c";
    if (s == supp_tc) return "tc";
    if (s == supp_sc) return "sc";
    return "unrestricted";
}

inline SupportSystem support_from_name(const std::string& n) {
    if (n == "c") return supp_c;
    if (n == "tc") return supp_tc;
    if (n == "sc") return supp_sc;
    if (n == "unrestricted") return supp_unrestricted;
    throw ValidationError("unknown support system '" + n + "'");
}

// ---------------------------------------------------------------------------
// The spacetime complex
//
// Global cell ids for degree k enumerate first the (time vertex × spatial
// k-cell) block, time-major, then the (time edge × spatial (k-1)-cell)
// block. Components are concatenated inside each time slice.
// ---------------------------------------------------------------------------

struct CellRef {
    int degree = 0;
    bool time_edge = false;  // false: time-vertex factor, true: time-edge factor
    int t = 0;               // time vertex index, or time edge index
    int comp = 0;
    int sp = 0;              // local index of the spatial factor in its component
};

struct SpacetimeComplex {
    AxisSpec time;
    std::vector<SpatialComponent> comps;
    int m = 0;  // spacetime dimension
    uint64_t uid = 0;

    std::vector<std::vector<int>> sp_offset;  // [deg][comp] -> global spatial offset
    std::vector<int> sp_total;                // [deg] -> alive spatial cells across comps
    std::vector<int> n_cells;                 // [k] -> spacetime cells of degree k

    // cached structure matrices and masks
    std::vector<RationalMatrix> d_full;          // [k] -> d_k : C^k -> C^{k+1}, 0 <= k < m
    std::vector<std::vector<Rat>> metric;        // [k][gid] -> diagonal metric weight
    std::vector<std::vector<bool>> time_stratum; // [k][gid]
    std::vector<std::vector<bool>> space_stratum;// [k][gid]

    int T() const { return time.n; }

    int spatial_gid(int deg, int comp, int local) const {
        return sp_offset[static_cast<size_t>(deg)][static_cast<size_t>(comp)] + local;
    }

    // spatial cells exist for degrees 0..m-1 only; degree-m spacetime cells
    // are purely time-edge × spatial-top
    int u_block(int k) const {
        return (k < m) ? (T() + 1) * sp_total[static_cast<size_t>(k)] : 0;
    }

    int encode(const CellRef& r) const {
        int k = r.degree;
        int sg = spatial_gid(r.time_edge ? k - 1 : k, r.comp, r.sp);
        if (!r.time_edge) return r.t * sp_total[static_cast<size_t>(k)] + sg;
        return u_block(k) + r.t * sp_total[static_cast<size_t>(k) - 1] + sg;
    }

    CellRef decode(int k, int gid) const {
        CellRef r;
        r.degree = k;
        int ublock = u_block(k);
        int sdeg, sg;
        if (gid < ublock) {
            r.time_edge = false;
            r.t = gid / std::max(1, sp_total[static_cast<size_t>(k)]);
            sg = gid % std::max(1, sp_total[static_cast<size_t>(k)]);
            sdeg = k;
        } else {
            r.time_edge = true;
            int rest = gid - ublock;
            r.t = rest / std::max(1, sp_total[static_cast<size_t>(k) - 1]);
            sg = rest % std::max(1, sp_total[static_cast<size_t>(k) - 1]);
            sdeg = k - 1;
        }
        const auto& off = sp_offset[static_cast<size_t>(sdeg)];
        int c = 0;
        while (c + 1 < static_cast<int>(off.size()) && off[static_cast<size_t>(c) + 1] <= sg) ++c;
        r.comp = c;
        r.sp = sg - off[static_cast<size_t>(c)];
        return r;
    }
};

using ComplexPtr = std::shared_ptr<const SpacetimeComplex>;

// ---------------------------------------------------------------------------
// build_complex
// ---------------------------------------------------------------------------

namespace detail {

inline std::atomic<uint64_t> complex_uid_counter{1};

// Index range of a factor along one axis.
inline int factor_count(const AxisSpec& a, bool edge) {
    return edge ? a.n : a.n_vertices();
}

// Top cells of the component that have the given cell as an iterated face.
// Per axis there are at most two candidate edge indices, so the candidate
// set has at most 2^dim members.
template <typename Fn>
void for_covering_tops(const std::vector<AxisSpec>& axes, const SpatialCell& c, Fn&& fn) {
    int dim = static_cast<int>(axes.size());
    std::vector<std::vector<int>> choices(static_cast<size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        const AxisSpec& ax = axes[static_cast<size_t>(a)];
        auto& ch = choices[static_cast<size_t>(a)];
        if (c.edge_mask & (1u << a)) {
            ch.push_back(c.idx[a]);
        } else if (ax.kind == AxisKind::Circle) {
            ch.push_back(((c.idx[a] - 1) % ax.n + ax.n) % ax.n);
            ch.push_back(c.idx[a] % ax.n);
            if (ch[0] == ch[1]) ch.pop_back();
        } else {
            if (c.idx[a] - 1 >= 0) ch.push_back(c.idx[a] - 1);
            if (c.idx[a] <= ax.n - 1) ch.push_back(c.idx[a]);
        }
    }
    std::vector<size_t> pick(static_cast<size_t>(dim), 0);
    while (true) {
        SpatialCell top;
        top.edge_mask = (dim == 0) ? 0 : ((1u << dim) - 1);
        for (int a = 0; a < dim; ++a)
            top.idx[a] = choices[static_cast<size_t>(a)][pick[static_cast<size_t>(a)]];
        fn(top);
        int a = 0;
        for (; a < dim; ++a) {
            if (pick[static_cast<size_t>(a)] + 1 < choices[static_cast<size_t>(a)].size()) {
                ++pick[static_cast<size_t>(a)];
                for (int b = 0; b < a; ++b) pick[static_cast<size_t>(b)] = 0;
                break;
            }
        }
        if (a == dim) break;
    }
}

inline bool is_deleted(const SpatialComponent& comp, const SpatialCell& top) {
    uint64_t key = pack_cell(top);
    return std::binary_search(comp.deleted_tops.begin(), comp.deleted_tops.end(), key);
}

inline bool cell_alive(const SpatialComponent& comp, const SpatialCell& c) {
    bool alive = false;
    for_covering_tops(comp.axes, c, [&](const SpatialCell& top) {
        if (!is_deleted(comp, top)) alive = true;
    });
    return alive;
}

inline bool touches_deleted_top(const SpatialComponent& comp, const SpatialCell& c) {
    bool touches = false;
    for_covering_tops(comp.axes, c, [&](const SpatialCell& top) {
        if (is_deleted(comp, top)) touches = true;
    });
    return touches;
}

inline bool on_outer_wall(const SpatialComponent& comp, const SpatialCell& c) {
    for (int a = 0; a < comp.dim(); ++a) {
        const AxisSpec& ax = comp.axes[static_cast<size_t>(a)];
        if (ax.kind != AxisKind::Interval) continue;
        if (!(c.edge_mask & (1u << a)) && (c.idx[a] == 0 || c.idx[a] == ax.n)) return true;
    }
    return false;
}

} // namespace detail

inline ComplexPtr build_complex(const ComplexSpec& spec) {
    auto cx = std::make_shared<SpacetimeComplex>();
    cx->uid = detail::complex_uid_counter.fetch_add(1);

    // --- validate axes -----------------------------------------------------
    const AxisSpec& t = spec.time;
    if (t.kind != AxisKind::Interval || t.signature != -1)
        throw BadSpec("the time axis must be an Interval with signature -1");
    if (t.n < 1) throw BadSpec("time axis needs at least 1 edge");
    if (t.spacing <= 0) throw BadSpec("time axis spacing must be positive");
    if (spec.components.empty()) throw BadSpec("a complex needs at least one component");

    int sdim = static_cast<int>(spec.components[0].axes.size());
    if (sdim < 1) throw BadSpec("spacetime dimension must be at least 2 (no spatial axes given)");
    if (sdim > kMaxAxes - 1) throw BadSpec("at most " + std::to_string(kMaxAxes - 1) + " spatial axes are supported");

    cx->time = t;
    cx->m = 1 + sdim;

    for (size_t ci = 0; ci < spec.components.size(); ++ci) {
        const ComponentSpec& cs = spec.components[ci];
        if (static_cast<int>(cs.axes.size()) != sdim)
            throw BadSpec("component " + std::to_string(ci) +
                          " has a different spatial dimension than component 0");
        SpatialComponent comp;
        comp.axes = cs.axes;
        for (size_t a = 0; a < cs.axes.size(); ++a) {
            const AxisSpec& ax = cs.axes[a];
            if (ax.signature != +1)
                throw BadSpec("spatial axis " + std::to_string(a) + " of component " +
                              std::to_string(ci) + " must have signature +1 "
                              "(exactly one time axis per complex)");
            if (ax.kind == AxisKind::Interval && ax.n < 1)
                throw BadSpec("Interval axis " + std::to_string(a) + " of component " +
                              std::to_string(ci) + " needs n >= 1");
            if (ax.kind == AxisKind::Circle && ax.n < 3)
                throw BadSpec("Circle axis " + std::to_string(a) + " of component " +
                              std::to_string(ci) + " needs n >= 3");
            if (ax.spacing <= 0)
                throw BadSpec("axis " + std::to_string(a) + " of component " +
                              std::to_string(ci) + " has non-positive spacing");
        }

        // --- deleted tops ---------------------------------------------------
        for (const auto& dt : cs.deleted_tops) {
            if (static_cast<int>(dt.size()) != sdim)
                throw BadSpec("a deleted top cell of component " + std::to_string(ci) +
                              " has the wrong index arity");
            SpatialCell top;
            top.edge_mask = (1u << sdim) - 1;
            for (int a = 0; a < sdim; ++a) {
                if (dt[static_cast<size_t>(a)] < 0 ||
                    dt[static_cast<size_t>(a)] >= cs.axes[static_cast<size_t>(a)].n)
                    throw BadSpec("deleted top cell index out of range in component " +
                                  std::to_string(ci));
                top.idx[a] = dt[static_cast<size_t>(a)];
            }
            comp.deleted_tops.push_back(pack_cell(top));
        }
        std::sort(comp.deleted_tops.begin(), comp.deleted_tops.end());
        comp.deleted_tops.erase(
            std::unique(comp.deleted_tops.begin(), comp.deleted_tops.end()),
            comp.deleted_tops.end());

        // --- enumerate alive cells per degree -------------------------------
        comp.cells.assign(static_cast<size_t>(sdim) + 1, {});
        for (uint32_t mask = 0; mask < (1u << sdim); ++mask) {
            int deg = __builtin_popcount(mask);
            std::vector<int> limit(static_cast<size_t>(sdim));
            for (int a = 0; a < sdim; ++a)
                limit[static_cast<size_t>(a)] =
                    detail::factor_count(comp.axes[static_cast<size_t>(a)], mask & (1u << a));
            SpatialCell c;
            c.edge_mask = mask;
            std::vector<int> cur(static_cast<size_t>(sdim), 0);
            while (true) {
                for (int a = 0; a < sdim; ++a) c.idx[a] = cur[static_cast<size_t>(a)];
                if (detail::cell_alive(comp, c))
                    comp.cells[static_cast<size_t>(deg)].push_back(pack_cell(c));
                int a = sdim - 1;
                for (; a >= 0; --a) {
                    if (cur[static_cast<size_t>(a)] + 1 < limit[static_cast<size_t>(a)]) {
                        ++cur[static_cast<size_t>(a)];
                        for (int b = a + 1; b < sdim; ++b) cur[static_cast<size_t>(b)] = 0;
                        break;
                    }
                }
                if (a < 0) break;
            }
        }
        for (auto& v : comp.cells) std::sort(v.begin(), v.end());

        if (comp.cells[static_cast<size_t>(sdim)].empty())
            throw BadSpec("component " + std::to_string(ci) + " has no surviving top cells");

        // --- connectivity of surviving tops ---------------------------------
        {
            const auto& tops = comp.cells[static_cast<size_t>(sdim)];
            std::vector<int> seen(tops.size(), 0);
            std::vector<int> stack = {0};
            seen[0] = 1;
            size_t visited = 1;
            while (!stack.empty()) {
                int cur_i = stack.back();
                stack.pop_back();
                SpatialCell top = unpack_cell(tops[static_cast<size_t>(cur_i)]);
                for (int a = 0; a < sdim; ++a) {
                    const AxisSpec& ax = comp.axes[static_cast<size_t>(a)];
                    for (int delta : {-1, +1}) {
                        SpatialCell nb = top;
                        int ni = top.idx[a] + delta;
                        if (ax.kind == AxisKind::Circle) ni = (ni % ax.n + ax.n) % ax.n;
                        else if (ni < 0 || ni >= ax.n) continue;
                        nb.idx[a] = ni;
                        auto it = std::lower_bound(tops.begin(), tops.end(), pack_cell(nb));
                        if (it == tops.end() || *it != pack_cell(nb)) continue;
                        int j = static_cast<int>(it - tops.begin());
                        if (!seen[static_cast<size_t>(j)]) {
                            seen[static_cast<size_t>(j)] = 1;
                            ++visited;
                            stack.push_back(j);
                        }
                    }
                }
            }
            if (visited != tops.size())
                throw BadSpec("deleted cells disconnect component " + std::to_string(ci) +
                              "; model the pieces as separate components");
        }

        // --- strata flags and metric weights ---------------------------------
        comp.in_stratum.assign(static_cast<size_t>(sdim) + 1, {});
        comp.weight.assign(static_cast<size_t>(sdim) + 1, {});
        for (int deg = 0; deg <= sdim; ++deg) {
            auto& strat = comp.in_stratum[static_cast<size_t>(deg)];
            auto& wt = comp.weight[static_cast<size_t>(deg)];
            for (uint64_t key : comp.cells[static_cast<size_t>(deg)]) {
                SpatialCell c = unpack_cell(key);
                bool edge_of_world = detail::on_outer_wall(comp, c) ||
                                     detail::touches_deleted_top(comp, c);
                strat.push_back(edge_of_world);
                Rat w(1);
                for (int a = 0; a < sdim; ++a) {
                    const Rat& h = comp.axes[static_cast<size_t>(a)].spacing;
                    if (c.edge_mask & (1u << a)) w /= h;
                    else w *= h;
                }
                wt.push_back(w);
            }
        }

        cx->comps.push_back(std::move(comp));
    }

    SpacetimeComplex& X = *cx;

    // --- global offsets and counts ------------------------------------------
    int sdim_total = X.m - 1;
    X.sp_offset.assign(static_cast<size_t>(sdim_total) + 1, {});
    X.sp_total.assign(static_cast<size_t>(sdim_total) + 1, 0);
    for (int deg = 0; deg <= sdim_total; ++deg) {
        int off = 0;
        for (const auto& comp : X.comps) {
            X.sp_offset[static_cast<size_t>(deg)].push_back(off);
            off += static_cast<int>(comp.cells[static_cast<size_t>(deg)].size());
        }
        X.sp_total[static_cast<size_t>(deg)] = off;
    }
    X.n_cells.assign(static_cast<size_t>(X.m) + 1, 0);
    int T = X.T();
    for (int k = 0; k <= X.m; ++k) {
        int u = (k <= sdim_total) ? (T + 1) * X.sp_total[static_cast<size_t>(k)] : 0;
        int w = (k >= 1) ? T * X.sp_total[static_cast<size_t>(k) - 1] : 0;
        X.n_cells[static_cast<size_t>(k)] = u + w;
    }

    // --- metric weights and strata over spacetime cells -----------------------
    X.metric.assign(static_cast<size_t>(X.m) + 1, {});
    X.time_stratum.assign(static_cast<size_t>(X.m) + 1, {});
    X.space_stratum.assign(static_cast<size_t>(X.m) + 1, {});
    for (int k = 0; k <= X.m; ++k) {
        auto& g = X.metric[static_cast<size_t>(k)];
        auto& ts = X.time_stratum[static_cast<size_t>(k)];
        auto& ss = X.space_stratum[static_cast<size_t>(k)];
        g.reserve(static_cast<size_t>(X.n_cells[static_cast<size_t>(k)]));
        if (k <= sdim_total) {
            for (int tv = 0; tv <= T; ++tv)
                for (const auto& comp : X.comps)
                    for (size_t i = 0; i < comp.cells[static_cast<size_t>(k)].size(); ++i) {
                        g.push_back(X.time.spacing * comp.weight[static_cast<size_t>(k)][i]);
                        ts.push_back(tv == 0 || tv == T);
                        ss.push_back(comp.in_stratum[static_cast<size_t>(k)][i]);
                    }
        }
        if (k >= 1) {
            for (int te = 0; te < T; ++te)
                for (const auto& comp : X.comps)
                    for (size_t i = 0; i < comp.cells[static_cast<size_t>(k) - 1].size(); ++i) {
                        g.push_back(-comp.weight[static_cast<size_t>(k) - 1][i] / X.time.spacing);
                        ts.push_back(false);
                        ss.push_back(comp.in_stratum[static_cast<size_t>(k) - 1][i]);
                    }
        }
    }

    // --- full coboundary matrices ---------------------------------------------
    X.d_full.clear();
    for (int k = 0; k < X.m; ++k) {
        RationalMatrix d(X.n_cells[static_cast<size_t>(k) + 1], X.n_cells[static_cast<size_t>(k)]);
        // rows indexed by degree k+1 cells; iterate and enumerate faces
        for (int gid = 0; gid < d.rows; ++gid) {
            CellRef r = X.decode(k + 1, gid);
            const SpatialComponent& comp = X.comps[static_cast<size_t>(r.comp)];
            int sdeg = r.time_edge ? k : k + 1;
            SpatialCell sc = unpack_cell(comp.cells[static_cast<size_t>(sdeg)][static_cast<size_t>(r.sp)]);

            auto add = [&](bool face_time_edge, int face_t, const SpatialCell& fsc, int sign) {
                int fdeg = face_time_edge ? k - 1 : k;
                if (fdeg < 0) return;
                int local = comp.find(fdeg, pack_cell(fsc));
                if (local < 0) return; // faces of alive cells are alive; defensive
                CellRef f;
                f.degree = k;
                f.time_edge = face_time_edge;
                f.t = face_t;
                f.comp = r.comp;
                f.sp = local;
                d.add_at(gid, X.encode(f), Rat(sign));
            };

            if (r.time_edge) {
                // time faces: +1 at upper vertex, -1 at lower vertex
                add(false, r.t + 1, sc, +1);
                add(false, r.t, sc, -1);
            }
            // spatial faces; the time edge, when present, precedes all
            // spatial slots and contributes one sign flip
            int base_sign = r.time_edge ? -1 : +1;
            int edges_before = 0;
            for (int a = 0; a < comp.dim(); ++a) {
                if (!(sc.edge_mask & (1u << a))) continue;
                int sign = base_sign * ((edges_before % 2 == 0) ? 1 : -1);
                ++edges_before;
                const AxisSpec& ax = comp.axes[static_cast<size_t>(a)];
                SpatialCell lower = sc, upper = sc;
                lower.edge_mask &= ~(1u << a);
                upper.edge_mask &= ~(1u << a);
                lower.idx[a] = sc.idx[a];
                upper.idx[a] = (ax.kind == AxisKind::Circle) ? (sc.idx[a] + 1) % ax.n
                                                             : sc.idx[a] + 1;
                add(r.time_edge, r.t, upper, +sign);
                add(r.time_edge, r.t, lower, -sign);
            }
        }
        X.d_full.push_back(std::move(d));
    }

    return cx;
}

// ---------------------------------------------------------------------------
// Support masks and cochains
// ---------------------------------------------------------------------------

inline std::vector<bool> allowed_mask(const SpacetimeComplex& c, int k, const SupportSystem& s) {
    std::vector<bool> mask(static_cast<size_t>(c.n_cells[static_cast<size_t>(k)]), true);
    for (size_t i = 0; i < mask.size(); ++i) {
        if (s.time_flag == Flag::Compact && c.time_stratum[static_cast<size_t>(k)][i]) mask[i] = false;
        if (s.space_flag == Flag::Compact && c.space_stratum[static_cast<size_t>(k)][i]) mask[i] = false;
    }
    return mask;
}

inline std::vector<int> allowed_cells(const SpacetimeComplex& c, int k, const SupportSystem& s) {
    std::vector<int> out;
    auto mask = allowed_mask(c, k, s);
    for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(static_cast<int>(i));
    return out;
}

struct Cochain {
    ComplexPtr complex;
    int degree = 0;
    SparseVec values; // keyed by global cell id
};

inline std::string describe_cell(const SpacetimeComplex& c, int k, int gid) {
    CellRef r = c.decode(k, gid);
    const SpatialComponent& comp = c.comps[static_cast<size_t>(r.comp)];
    int sdeg = r.time_edge ? k - 1 : k;
    SpatialCell sc = unpack_cell(comp.cells[static_cast<size_t>(sdeg)][static_cast<size_t>(r.sp)]);
    std::string out = "cell{c" + std::to_string(r.comp) + ", t:";
    out += (r.time_edge ? "e" : "v") + std::to_string(r.t);
    const char* names[] = {"x", "y", "z", "w"};
    for (int a = 0; a < comp.dim(); ++a) {
        out += std::string(", ") + names[a] + ":";
        out += ((sc.edge_mask & (1u << a)) ? "e" : "v") + std::to_string(sc.idx[a]);
    }
    out += "}";
    return out;
}

inline Cochain make_cochain(ComplexPtr c, int degree, SparseVec values = {}) {
    if (degree < 0 || degree > c->m)
        throw DegreeMismatch("degree " + std::to_string(degree) + " outside 0.." + std::to_string(c->m));
    for (const auto& [gid, v] : values.terms) {
        (void)v;
        if (gid < 0 || gid >= c->n_cells[static_cast<size_t>(degree)])
            throw ValidationError("cochain keys a cell id outside the complex");
    }
    return Cochain{std::move(c), degree, std::move(values)};
}

inline bool satisfies(const Cochain& w, const SupportSystem& s, int* offending = nullptr) {
    const auto& ts = w.complex->time_stratum[static_cast<size_t>(w.degree)];
    const auto& ss = w.complex->space_stratum[static_cast<size_t>(w.degree)];
    for (const auto& [gid, v] : w.values.terms) {
        (void)v;
        bool bad = (s.time_flag == Flag::Compact && ts[static_cast<size_t>(gid)]) ||
                   (s.space_flag == Flag::Compact && ss[static_cast<size_t>(gid)]);
        if (bad) {
            if (offending) *offending = gid;
            return false;
        }
    }
    return true;
}

inline void require_support(const Cochain& w, const SupportSystem& s, const std::string& what) {
    int bad = -1;
    if (!satisfies(w, s, &bad))
        throw ValidationError(what + ": cochain does not satisfy support system " +
                              support_name(s) + "; nonzero on " +
                              describe_cell(*w.complex, w.degree, bad));
}

inline void require_same_complex(const Cochain& a, const Cochain& b, const std::string& what) {
    if (a.complex->uid != b.complex->uid)
        throw ComplexMismatch(what + ": cochains live on different complexes");
}

inline Cochain apply_d(const Cochain& w) {
    if (w.degree >= w.complex->m)
        throw DegreeMismatch("cannot apply d to a top-degree cochain");
    return Cochain{w.complex, w.degree + 1,
                   mat_vec(w.complex->d_full[static_cast<size_t>(w.degree)], w.values)};
}

// ---------------------------------------------------------------------------
// coboundary / codifferential / metric
// ---------------------------------------------------------------------------

// Sub-matrix with the given row/col ids (order preserved).
inline RationalMatrix submatrix(const RationalMatrix& m, const std::vector<int>& rows,
                                const std::vector<int>& cols) {
    std::vector<int> col_pos(static_cast<size_t>(m.cols), -1);
    for (size_t j = 0; j < cols.size(); ++j) col_pos[static_cast<size_t>(cols[j])] = static_cast<int>(j);
    RationalMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (const auto& [c, v] : m.row[static_cast<size_t>(rows[i])].terms) {
            int p = col_pos[static_cast<size_t>(c)];
            if (p >= 0) out.row[i].terms.push_back({p, v});
        }
    return out;
}

inline RationalMatrix coboundary_matrix(const SpacetimeComplex& c, int k, const SupportSystem& s) {
    if (k < 0 || k >= c.m)
        throw DegreeMismatch("coboundary degree " + std::to_string(k) + " outside 0.." +
                             std::to_string(c.m - 1));
    return submatrix(c.d_full[static_cast<size_t>(k)], allowed_cells(c, k + 1, s), allowed_cells(c, k, s));
}

// Full-size codifferential G_k^{-1} d^T G_{k+1}, assembled as a product.
inline RationalMatrix full_codifferential(const SpacetimeComplex& c, int k) {
    if (k < 1 || k > c.m)
        throw DegreeMismatch("codifferential degree " + std::to_string(k) + " outside 1.." +
                             std::to_string(c.m));
    RationalMatrix dt = transpose(c.d_full[static_cast<size_t>(k) - 1]);
    // dt: rows = degree k-1 cells, cols = degree k cells
    RationalMatrix out(dt.rows, dt.cols);
    const auto& glo = c.metric[static_cast<size_t>(k) - 1];
    const auto& ghi = c.metric[static_cast<size_t>(k)];
    for (int r = 0; r < dt.rows; ++r) {
        Rat inv = Rat(1) / glo[static_cast<size_t>(r)];
        for (const auto& [col, v] : dt.row[static_cast<size_t>(r)].terms)
            out.row[static_cast<size_t>(r)].terms.push_back({col, inv * v * ghi[static_cast<size_t>(col)]});
    }
    return out;
}

// Matrix of the projected codifferential C^k_s -> C^{k-1}_s. Note the shift:
// this maps degree k to degree k-1.
inline RationalMatrix codifferential_matrix(const SpacetimeComplex& c, int k, const SupportSystem& s) {
    return submatrix(full_codifferential(c, k), allowed_cells(c, k - 1, s), allowed_cells(c, k, s));
}

inline Cochain apply_delta(const Cochain& w) {
    return Cochain{w.complex, w.degree - 1,
                   mat_vec(full_codifferential(*w.complex, w.degree), w.values)};
}

inline Rat metric_pairing(const Cochain& a, const Cochain& b) {
    require_same_complex(a, b, "metric_pairing");
    if (a.degree != b.degree)
        throw DegreeMismatch("metric_pairing: degrees " + std::to_string(a.degree) + " vs " +
                             std::to_string(b.degree));
    const auto& g = a.complex->metric[static_cast<size_t>(a.degree)];
    Rat sum(0);
    size_t ia = 0, ib = 0;
    const auto& at = a.values.terms;
    const auto& bt = b.values.terms;
    while (ia < at.size() && ib < bt.size()) {
        if (at[ia].first < bt[ib].first) ++ia;
        else if (bt[ib].first < at[ia].first) ++ib;
        else {
            sum += g[static_cast<size_t>(at[ia].first)] * at[ia].second * bt[ib].second;
            ++ia;
            ++ib;
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Cup product and the wedge pairing
//
// (α ⌣ β)(σ) = Σ_{A ⊆ edge-axes(σ), |A| = deg α} ε(A, B) · α(front_A σ) · β(back_B σ)
// where front keeps A-edges and drops B-edges to their lower vertices, back
// keeps B-edges and raises A-edges to their upper vertices, and ε counts the
// inversions between A and B slots. The time slot participates like any axis
// (it is axis number -1, ordered before all spatial axes).
// ---------------------------------------------------------------------------

namespace detail {

struct FactorCell {
    bool time_edge;
    int t;
    int comp;
    SpatialCell sc;
};

inline FactorCell factor_view(const SpacetimeComplex& c, int k, int gid) {
    CellRef r = c.decode(k, gid);
    const SpatialComponent& comp = c.comps[static_cast<size_t>(r.comp)];
    int sdeg = r.time_edge ? k - 1 : k;
    return FactorCell{r.time_edge, r.t, r.comp,
                      unpack_cell(comp.cells[static_cast<size_t>(sdeg)][static_cast<size_t>(r.sp)])};
}

inline int factor_gid(const SpacetimeComplex& c, const FactorCell& f) {
    int sdeg = __builtin_popcount(f.sc.edge_mask);
    int local = c.comps[static_cast<size_t>(f.comp)].find(sdeg, pack_cell(f.sc));
    if (local < 0) return -1;
    CellRef r;
    r.degree = sdeg + (f.time_edge ? 1 : 0);
    r.time_edge = f.time_edge;
    r.t = f.t;
    r.comp = f.comp;
    r.sp = local;
    return c.encode(r);
}

} // namespace detail

inline Cochain cup_product(const Cochain& a, const Cochain& b) {
    require_same_complex(a, b, "cup_product");
    const SpacetimeComplex& X = *a.complex;
    int k = a.degree, l = b.degree;
    if (k + l > X.m) throw DegreeMismatch("cup_product: degree sum exceeds the dimension");

    Cochain out{a.complex, k + l, {}};
    int n = X.n_cells[static_cast<size_t>(k + l)];
    for (int gid = 0; gid < n; ++gid) {
        detail::FactorCell f = detail::factor_view(X, k + l, gid);
        const SpatialComponent& comp = X.comps[static_cast<size_t>(f.comp)];
        // edge slots: time slot (id -1) first, then spatial axes
        std::vector<int> slots;
        if (f.time_edge) slots.push_back(-1);
        for (int ax = 0; ax < comp.dim(); ++ax)
            if (f.sc.edge_mask & (1u << ax)) slots.push_back(ax);
        int e = static_cast<int>(slots.size());
        if (k > e || l > e - k) continue;

        Rat total(0);
        for (uint32_t bits = 0; bits < (1u << e); ++bits) {
            if (__builtin_popcount(bits) != k) continue;
            // ε(A,B): inversions where a B slot precedes an A slot
            int inv = 0;
            int bs_seen = 0;
            for (int s = 0; s < e; ++s) {
                if (bits & (1u << s)) inv += bs_seen;
                else ++bs_seen;
            }
            detail::FactorCell front = f, back = f;
            bool ok = true;
            for (int s = 0; s < e && ok; ++s) {
                bool in_a = bits & (1u << s);
                int ax = slots[static_cast<size_t>(s)];
                if (ax == -1) {
                    if (in_a) { // front keeps the time edge; back takes the upper vertex
                        back.time_edge = false;
                        back.t = f.t + 1;
                    } else {    // back keeps; front takes the lower vertex
                        front.time_edge = false;
                        front.t = f.t;
                    }
                } else {
                    const AxisSpec& axis = comp.axes[static_cast<size_t>(ax)];
                    if (in_a) {
                        back.sc.edge_mask &= ~(1u << ax);
                        back.sc.idx[ax] = (axis.kind == AxisKind::Circle)
                                              ? (f.sc.idx[ax] + 1) % axis.n
                                              : f.sc.idx[ax] + 1;
                    } else {
                        front.sc.edge_mask &= ~(1u << ax);
                        front.sc.idx[ax] = f.sc.idx[ax];
                    }
                }
            }
            int fg = detail::factor_gid(X, front);
            int bg = detail::factor_gid(X, back);
            if (fg < 0 || bg < 0) continue; // defensive: faces of alive cells are alive
            Rat va = sv_get(a.values, fg);
            if (va == 0) continue;
            Rat vb = sv_get(b.values, bg);
            if (vb == 0) continue;
            Rat term = va * vb;
            if (inv % 2 != 0) term = -term;
            total += term;
        }
        if (total != 0) out.values.terms.push_back({gid, total});
    }
    return out;
}

// Integral of α ∧ β over the fundamental chain (all alive top cells with
// coefficient one). Degrees must sum to the dimension.
inline Rat wedge_pairing(const Cochain& a, const Cochain& b) {
    require_same_complex(a, b, "wedge_pairing");
    if (a.degree + b.degree != a.complex->m)
        throw DegreeMismatch("wedge_pairing: degrees must sum to " + std::to_string(a.complex->m));
    Cochain top = cup_product(a, b);
    Rat sum(0);
    for (const auto& [gid, v] : top.values.terms) {
        (void)gid;
        sum += v;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

struct ComponentMap {
    int target_comp = 0;
    int time_offset = 0;
    std::vector<int> axis_offset; // one per spatial axis
};

struct Embedding {
    ComplexPtr source, target;
    std::vector<ComponentMap> maps; // one per source component
    int collar_margin = 1;
};

namespace detail {

// Maps a source factor cell to target coordinates; aliveness is checked by
// the caller.
inline FactorCell map_factor(const Embedding& e, int scomp, const FactorCell& f) {
    const ComponentMap& cm = e.maps[static_cast<size_t>(scomp)];
    const SpatialComponent& src = e.source->comps[static_cast<size_t>(scomp)];
    const SpatialComponent& tgt = e.target->comps[static_cast<size_t>(cm.target_comp)];
    FactorCell out = f;
    out.comp = cm.target_comp;
    out.t = f.t + cm.time_offset;
    for (int a = 0; a < src.dim(); ++a) {
        int idx = f.sc.idx[a] + cm.axis_offset[static_cast<size_t>(a)];
        if (tgt.axes[static_cast<size_t>(a)].kind == AxisKind::Circle) {
            int n = tgt.axes[static_cast<size_t>(a)].n;
            idx = (idx % n + n) % n;
        }
        out.sc.idx[a] = idx;
    }
    return out;
}

} // namespace detail

inline int map_cell(const Embedding& e, int k, int gid) {
    CellRef r = e.source->decode(k, gid);
    detail::FactorCell f = detail::factor_view(*e.source, k, gid);
    detail::FactorCell g = detail::map_factor(e, r.comp, f);
    int out = detail::factor_gid(*e.target, g);
    if (out < 0)
        throw Error("embedding image of " + describe_cell(*e.source, k, gid) +
                    " is not alive in the target");
    return out;
}

inline Embedding make_embedding(ComplexPtr source, ComplexPtr target,
                                std::vector<ComponentMap> maps, int collar_margin = 1) {
    if (collar_margin < 1) throw ValidationError("embedding collar_margin must be >= 1");
    if (maps.size() != source->comps.size())
        throw ValidationError("embedding needs exactly one component map per source component");

    Embedding e{std::move(source), std::move(target), std::move(maps), collar_margin};
    const SpacetimeComplex& S = *e.source;
    const SpacetimeComplex& Tg = *e.target;

    if (S.m != Tg.m) throw ValidationError("embedding between complexes of different dimension");
    // time axis: order-preserving interval shift
    if (e.maps.empty()) throw ValidationError("embedding with no components");
    int toff = e.maps[0].time_offset;
    for (const auto& cm : e.maps)
        if (cm.time_offset != toff)
            throw ValidationError("embedding time offsets must agree across components "
                                  "(one shared time axis)");
    if (toff < 0 || toff + S.T() > Tg.T())
        throw ValidationError("embedding time window [" + std::to_string(toff) + ", " +
                              std::to_string(toff + S.T()) + "] exceeds the target time axis");

    for (size_t ci = 0; ci < S.comps.size(); ++ci) {
        const ComponentMap& cm = e.maps[ci];
        if (cm.target_comp < 0 || cm.target_comp >= static_cast<int>(Tg.comps.size()))
            throw ValidationError("embedding maps component " + std::to_string(ci) +
                                  " to a nonexistent target component");
        const SpatialComponent& src = S.comps[ci];
        const SpatialComponent& tgt = Tg.comps[static_cast<size_t>(cm.target_comp)];
        if (static_cast<int>(cm.axis_offset.size()) != src.dim())
            throw ValidationError("embedding axis offsets have the wrong arity for component " +
                                  std::to_string(ci));
        for (int a = 0; a < src.dim(); ++a) {
            const AxisSpec& sa = src.axes[static_cast<size_t>(a)];
            const AxisSpec& ta = tgt.axes[static_cast<size_t>(a)];
            int off = cm.axis_offset[static_cast<size_t>(a)];
            if (sa.kind == AxisKind::Interval && ta.kind == AxisKind::Interval) {
                if (off < 0 || off + sa.n > ta.n)
                    throw ValidationError("embedding axis " + std::to_string(a) + " window [" +
                                          std::to_string(off) + ", " + std::to_string(off + sa.n) +
                                          "] exceeds the target axis");
            } else if (sa.kind == AxisKind::Interval && ta.kind == AxisKind::Circle) {
                if (sa.n >= ta.n)
                    throw ValidationError("an Interval axis only embeds into a strictly larger Circle");
            } else if (sa.kind == AxisKind::Circle && ta.kind == AxisKind::Circle) {
                if (sa.n != ta.n)
                    throw ValidationError("Circle axes only embed into Circles of equal size");
            } else {
                throw ValidationError("a Circle axis cannot embed into an Interval axis");
            }
        }
        // image tops must be alive in the target
        for (uint64_t key : src.cells[static_cast<size_t>(src.dim())]) {
            detail::FactorCell f{false, 0, static_cast<int>(ci), unpack_cell(key)};
            detail::FactorCell g = detail::map_factor(e, static_cast<int>(ci), f);
            if (tgt.find(src.dim(), pack_cell(g.sc)) < 0)
                throw ValidationError("embedding image of a surviving top cell of component " +
                                      std::to_string(ci) + " is deleted in the target");
        }
    }

    // injectivity across components: image vertex sets must not collide
    std::vector<std::vector<uint64_t>> images(Tg.comps.size());
    for (size_t ci = 0; ci < S.comps.size(); ++ci) {
        const SpatialComponent& src = S.comps[ci];
        for (uint64_t key : src.cells[0]) {
            detail::FactorCell f{false, 0, static_cast<int>(ci), unpack_cell(key)};
            detail::FactorCell g = detail::map_factor(e, static_cast<int>(ci), f);
            images[static_cast<size_t>(e.maps[ci].target_comp)].push_back(pack_cell(g.sc));
        }
    }
    for (auto& v : images) {
        std::sort(v.begin(), v.end());
        if (std::adjacent_find(v.begin(), v.end()) != v.end())
            throw ValidationError("embedding is not injective: two source cells share an image");
    }
    return e;
}

// Composite of two embeddings (inner first). Offsets add per axis; the result
// is re-validated from scratch and keeps the wider collar margin.
inline Embedding compose_embeddings(const Embedding& outer, const Embedding& inner) {
    if (inner.target->uid != outer.source->uid)
        throw ComplexMismatch("compose_embeddings: inner target differs from outer source");
    std::vector<ComponentMap> maps;
    maps.reserve(inner.maps.size());
    for (const ComponentMap& im : inner.maps) {
        const ComponentMap& om = outer.maps[static_cast<size_t>(im.target_comp)];
        ComponentMap cm;
        cm.target_comp = om.target_comp;
        cm.time_offset = im.time_offset + om.time_offset;
        for (size_t a = 0; a < im.axis_offset.size(); ++a)
            cm.axis_offset.push_back(im.axis_offset[a] + om.axis_offset[a]);
        maps.push_back(std::move(cm));
    }
    return make_embedding(inner.source, outer.target, std::move(maps),
                          std::max(inner.collar_margin, outer.collar_margin));
}

// ---------------------------------------------------------------------------
// Collar discipline, pushforward, pullback
// ---------------------------------------------------------------------------

namespace detail {

// True when the target cell with these factors is inside the image of e.
inline bool in_image(const Embedding& e, const FactorCell& tgt_cell) {
    const SpacetimeComplex& S = *e.source;
    for (size_t ci = 0; ci < S.comps.size(); ++ci) {
        const ComponentMap& cm = e.maps[ci];
        if (cm.target_comp != tgt_cell.comp) continue;
        const SpatialComponent& src = S.comps[ci];
        // invert the affine map
        FactorCell pre = tgt_cell;
        pre.comp = static_cast<int>(ci);
        pre.t = tgt_cell.t - cm.time_offset;
        int lo = pre.time_edge ? 0 : 0;
        int hi = pre.time_edge ? S.T() - 1 : S.T();
        if (pre.t < lo || pre.t > hi) continue;
        bool ok = true;
        for (int a = 0; a < src.dim() && ok; ++a) {
            const AxisSpec& sa = src.axes[static_cast<size_t>(a)];
            const AxisSpec& ta = e.target->comps[static_cast<size_t>(cm.target_comp)]
                                     .axes[static_cast<size_t>(a)];
            int idx = tgt_cell.sc.idx[a] - cm.axis_offset[static_cast<size_t>(a)];
            if (ta.kind == AxisKind::Circle) idx = (idx % ta.n + ta.n) % ta.n;
            bool edge = tgt_cell.sc.edge_mask & (1u << a);
            int max = edge ? sa.n - 1 : (sa.kind == AxisKind::Circle ? sa.n - 1 : sa.n);
            if (idx < 0 || idx > max) ok = false;
            else pre.sc.idx[a] = idx;
        }
        if (!ok) continue;
        int sdeg = __builtin_popcount(pre.sc.edge_mask);
        if (src.find(sdeg, pack_cell(pre.sc)) >= 0) return true;
    }
    return false;
}

// Enumerates the target cofaces (degree+1) of a target cell.
template <typename Fn>
void for_cofaces(const SpacetimeComplex& X, const FactorCell& f, Fn&& fn) {
    const SpatialComponent& comp = X.comps[static_cast<size_t>(f.comp)];
    if (!f.time_edge) {
        // raise the time vertex to an adjacent time edge
        for (int te : {f.t - 1, f.t}) {
            if (te < 0 || te >= X.T()) continue;
            FactorCell g = f;
            g.time_edge = true;
            g.t = te;
            fn(g);
        }
    }
    for (int a = 0; a < comp.dim(); ++a) {
        if (f.sc.edge_mask & (1u << a)) continue;
        const AxisSpec& ax = comp.axes[static_cast<size_t>(a)];
        std::vector<int> cand;
        if (ax.kind == AxisKind::Circle) {
            cand = {((f.sc.idx[a] - 1) % ax.n + ax.n) % ax.n, f.sc.idx[a] % ax.n};
            if (cand[0] == cand[1]) cand.pop_back();
        } else {
            if (f.sc.idx[a] - 1 >= 0) cand.push_back(f.sc.idx[a] - 1);
            if (f.sc.idx[a] <= ax.n - 1) cand.push_back(f.sc.idx[a]);
        }
        for (int eidx : cand) {
            FactorCell g = f;
            g.sc.edge_mask |= (1u << a);
            g.sc.idx[a] = eidx;
            int sdeg = __builtin_popcount(g.sc.edge_mask);
            if (comp.find(sdeg, pack_cell(g.sc)) < 0) continue; // dead coface
            fn(g);
        }
    }
}

// Source cells whose image has an alive target coface outside the image; the
// one-cell collar. Returns flags per source cell of degree k, with the kind
// of frontier (time/space) that was crossed.
struct LeakInfo {
    bool leaks = false;
    bool time_side = false;
    bool space_side = false;
};

inline LeakInfo leak_info(const Embedding& e, int k, int gid) {
    LeakInfo info;
    CellRef r = e.source->decode(k, gid);
    FactorCell f = factor_view(*e.source, k, gid);
    FactorCell g = map_factor(e, r.comp, f);
    for_cofaces(*e.target, g, [&](const FactorCell& cof) {
        if (in_image(e, cof)) return;
        info.leaks = true;
        if (cof.time_edge != g.time_edge) info.time_side = true;
        else info.space_side = true;
    });
    return info;
}

// Grid-closure adjacency: two cells of the same component whose coordinate
// intervals intersect along every axis (used to widen the collar).
inline bool closures_touch(const SpacetimeComplex& X, int comp, const FactorCell& a,
                           const FactorCell& b) {
    auto overlap_interval = [](int lo1, int hi1, int lo2, int hi2) {
        return lo1 <= hi2 && lo2 <= hi1;
    };
    int alo = a.t, ahi = a.t + (a.time_edge ? 1 : 0);
    int blo = b.t, bhi = b.t + (b.time_edge ? 1 : 0);
    if (!overlap_interval(alo, ahi, blo, bhi)) return false;
    const SpatialComponent& cm = X.comps[static_cast<size_t>(comp)];
    for (int ax = 0; ax < cm.dim(); ++ax) {
        const AxisSpec& axis = cm.axes[static_cast<size_t>(ax)];
        int al = a.sc.idx[ax], ah = al + ((a.sc.edge_mask >> ax) & 1);
        int bl = b.sc.idx[ax], bh = bl + ((b.sc.edge_mask >> ax) & 1);
        if (axis.kind == AxisKind::Circle) {
            int n = axis.n;
            bool touch = false;
            for (int d : {-n, 0, n})
                if (overlap_interval(al + d, ah + d, bl, bh)) touch = true;
            if (!touch) return false;
        } else {
            if (!overlap_interval(al, ah, bl, bh)) return false;
        }
    }
    return true;
}

} // namespace detail

// Source cells of degree k within the collar (width = collar_margin) of the
// image frontier, in ascending id order.
inline std::vector<int> collar_cells(const Embedding& e, int k) {
    const SpacetimeComplex& S = *e.source;
    int m = S.m;
    // The collar widens through cells of every degree: a vertex band and the
    // time-edge band next to it alternate as layers grow.
    std::vector<std::vector<bool>> flag(static_cast<size_t>(m) + 1);
    std::vector<std::vector<detail::FactorCell>> views(static_cast<size_t>(m) + 1);
    std::vector<std::vector<int>> comp_of(static_cast<size_t>(m) + 1);
    for (int d = 0; d <= m; ++d) {
        int n = S.n_cells[static_cast<size_t>(d)];
        flag[static_cast<size_t>(d)].assign(static_cast<size_t>(n), false);
        views[static_cast<size_t>(d)].reserve(static_cast<size_t>(n));
        comp_of[static_cast<size_t>(d)].reserve(static_cast<size_t>(n));
        for (int gid = 0; gid < n; ++gid) {
            views[static_cast<size_t>(d)].push_back(detail::factor_view(S, d, gid));
            comp_of[static_cast<size_t>(d)].push_back(S.decode(d, gid).comp);
            if (detail::leak_info(e, d, gid).leaks)
                flag[static_cast<size_t>(d)][static_cast<size_t>(gid)] = true;
        }
    }

    for (int step = 1; step < e.collar_margin; ++step) {
        auto next = flag;
        for (int di = 0; di <= m; ++di)
            for (int i = 0; i < S.n_cells[static_cast<size_t>(di)]; ++i) {
                if (flag[static_cast<size_t>(di)][static_cast<size_t>(i)]) continue;
                bool hit = false;
                for (int dj = 0; dj <= m && !hit; ++dj)
                    for (int j = 0; j < S.n_cells[static_cast<size_t>(dj)]; ++j) {
                        if (!flag[static_cast<size_t>(dj)][static_cast<size_t>(j)]) continue;
                        int ci = comp_of[static_cast<size_t>(di)][static_cast<size_t>(i)];
                        if (ci != comp_of[static_cast<size_t>(dj)][static_cast<size_t>(j)]) continue;
                        if (detail::closures_touch(S, ci, views[static_cast<size_t>(di)][static_cast<size_t>(i)],
                                                   views[static_cast<size_t>(dj)][static_cast<size_t>(j)])) {
                            hit = true;
                            break;
                        }
                    }
                if (hit) next[static_cast<size_t>(di)][static_cast<size_t>(i)] = true;
            }
        flag = std::move(next);
    }

    std::vector<int> out;
    for (int i = 0; i < S.n_cells[static_cast<size_t>(k)]; ++i)
        if (flag[static_cast<size_t>(k)][static_cast<size_t>(i)]) out.push_back(i);
    return out;
}

// Extension by zero along the embedding. The declared support system must be
// Compact on each side (time/space) where the image frontier is interior to
// the target, and the cochain must vanish on the collar.
inline Cochain pushforward(const Embedding& e, const Cochain& w, const SupportSystem& s) {
    if (w.complex->uid != e.source->uid)
        throw ComplexMismatch("pushforward: cochain does not live on the embedding source");
    require_support(w, s, "pushforward");

    // frontier kinds present anywhere along the embedding
    bool time_frontier = false, space_frontier = false;
    for (int gid = 0; gid < e.source->n_cells[static_cast<size_t>(w.degree)]; ++gid) {
        detail::LeakInfo li = detail::leak_info(e, w.degree, gid);
        if (li.time_side) time_frontier = true;
        if (li.space_side) space_frontier = true;
    }
    if (time_frontier && s.time_flag != Flag::Compact)
        throw ValidationError("pushforward: the image time frontier is interior to the target; "
                              "the support system must be time-Compact");
    if (space_frontier && s.space_flag != Flag::Compact)
        throw ValidationError("pushforward: the image space frontier is interior to the target; "
                              "the support system must be space-Compact");

    std::vector<int> collar = collar_cells(e, w.degree);
    for (int gid : collar)
        if (sv_get(w.values, gid) != 0)
            throw SupportLeak("pushforward: cochain is nonzero within the collar at " +
                              describe_cell(*e.source, w.degree, gid));

    Cochain out{e.target, w.degree, {}};
    for (const auto& [gid, v] : w.values.terms)
        out.values.terms.push_back({map_cell(e, w.degree, gid), v});
    std::sort(out.values.terms.begin(), out.values.terms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    require_support(out, s, "pushforward (result)");
    return out;
}

// Restriction to the image, re-indexed to the source.
inline Cochain pullback(const Embedding& e, const Cochain& w) {
    if (w.complex->uid != e.target->uid)
        throw ComplexMismatch("pullback: cochain does not live on the embedding target");
    Cochain out{e.source, w.degree, {}};
    int n = e.source->n_cells[static_cast<size_t>(w.degree)];
    for (int gid = 0; gid < n; ++gid) {
        Rat v = sv_get(w.values, map_cell(e, w.degree, gid));
        if (v != 0) out.values.terms.push_back({gid, v});
    }
    return out;
}

} // namespace gaugeloc
