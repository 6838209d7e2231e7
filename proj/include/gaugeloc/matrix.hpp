#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include <gaugeloc/errors.hpp>
#include <gaugeloc/rational.hpp>

namespace gaugeloc {

// ---------------------------------------------------------------------------
// Sparse rational vectors
//
// Terms are sorted by index and never zero. Every mutating helper below
// restores that invariant, so downstream code can compare vectors with ==.
// ---------------------------------------------------------------------------

struct SparseVec {
    std::vector<std::pair<int, Rat>> terms;

    bool is_zero() const { return terms.empty(); }
    int leading_index() const { return terms.empty() ? -1 : terms.front().first; }
    const Rat& leading_coeff() const { return terms.front().second; }

    bool operator==(const SparseVec& o) const { return terms == o.terms; }
};

inline Rat sv_get(const SparseVec& v, int i) {
    auto it = std::lower_bound(v.terms.begin(), v.terms.end(), i,
                               [](const auto& t, int idx) { return t.first < idx; });
    if (it != v.terms.end() && it->first == i) return it->second;
    return Rat(0);
}

inline void sv_set(SparseVec& v, int i, const Rat& val) {
    auto it = std::lower_bound(v.terms.begin(), v.terms.end(), i,
                               [](const auto& t, int idx) { return t.first < idx; });
    if (it != v.terms.end() && it->first == i) {
        if (val == 0) v.terms.erase(it);
        else it->second = val;
    } else if (val != 0) {
        v.terms.insert(it, {i, val});
    }
}

inline SparseVec sv_unit(int i) {
    SparseVec v;
    v.terms.push_back({i, Rat(1)});
    return v;
}

inline SparseVec sv_scale(const SparseVec& v, const Rat& c) {
    SparseVec r;
    if (c == 0) return r;
    r.terms.reserve(v.terms.size());
    for (const auto& [i, x] : v.terms) r.terms.push_back({i, x * c});
    return r;
}

// a + c*b, merged in one pass.
inline SparseVec sv_axpy(const SparseVec& a, const Rat& c, const SparseVec& b) {
    if (c == 0) return a;
    SparseVec r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    size_t ia = 0, ib = 0;
    while (ia < a.terms.size() || ib < b.terms.size()) {
        if (ib == b.terms.size() ||
            (ia < a.terms.size() && a.terms[ia].first < b.terms[ib].first)) {
            r.terms.push_back(a.terms[ia++]);
        } else if (ia == a.terms.size() || b.terms[ib].first < a.terms[ia].first) {
            r.terms.push_back({b.terms[ib].first, c * b.terms[ib].second});
            ++ib;
        } else {
            Rat s = a.terms[ia].second + c * b.terms[ib].second;
            if (s != 0) r.terms.push_back({a.terms[ia].first, s});
            ++ia;
            ++ib;
        }
    }
    return r;
}

inline SparseVec sv_add(const SparseVec& a, const SparseVec& b) {
    return sv_axpy(a, Rat(1), b);
}
inline SparseVec sv_sub(const SparseVec& a, const SparseVec& b) {
    return sv_axpy(a, Rat(-1), b);
}

inline Rat sv_dot(const SparseVec& a, const SparseVec& b) {
    Rat s(0);
    size_t ia = 0, ib = 0;
    while (ia < a.terms.size() && ib < b.terms.size()) {
        if (a.terms[ia].first < b.terms[ib].first) ++ia;
        else if (b.terms[ib].first < a.terms[ia].first) ++ib;
        else {
            s += a.terms[ia].second * b.terms[ib].second;
            ++ia;
            ++ib;
        }
    }
    return s;
}

inline SparseVec sv_from_dense(const std::vector<Rat>& d) {
    SparseVec v;
    for (size_t i = 0; i < d.size(); ++i)
        if (d[i] != 0) v.terms.push_back({static_cast<int>(i), d[i]});
    return v;
}

inline std::vector<Rat> sv_to_dense(const SparseVec& v, int n) {
    std::vector<Rat> d(static_cast<size_t>(n), Rat(0));
    for (const auto& [i, x] : v.terms) d[static_cast<size_t>(i)] = x;
    return d;
}

// ---------------------------------------------------------------------------
// Sparse rational matrices (row major)
// ---------------------------------------------------------------------------

struct RationalMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<SparseVec> row;

    RationalMatrix() = default;
    RationalMatrix(int r, int c) : rows(r), cols(c), row(static_cast<size_t>(r)) {}

    static RationalMatrix identity(int n) {
        RationalMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.row[static_cast<size_t>(i)] = sv_unit(i);
        return m;
    }

    Rat at(int r, int c) const { return sv_get(row[static_cast<size_t>(r)], c); }
    void set(int r, int c, const Rat& v) { sv_set(row[static_cast<size_t>(r)], c, v); }
    void add_at(int r, int c, const Rat& v) {
        sv_set(row[static_cast<size_t>(r)], c, at(r, c) + v);
    }

    size_t nnz() const {
        size_t n = 0;
        for (const auto& r : row) n += r.terms.size();
        return n;
    }
    bool is_zero() const { return nnz() == 0; }
    bool operator==(const RationalMatrix& o) const {
        return rows == o.rows && cols == o.cols && row == o.row;
    }
};

inline RationalMatrix transpose(const RationalMatrix& m) {
    RationalMatrix t(m.cols, m.rows);
    for (int r = 0; r < m.rows; ++r)
        for (const auto& [c, v] : m.row[static_cast<size_t>(r)].terms)
            t.row[static_cast<size_t>(c)].terms.push_back({r, v});
    return t; // column-sorted because rows were visited in order
}

inline SparseVec mat_vec(const RationalMatrix& m, const SparseVec& x) {
    SparseVec y;
    for (int r = 0; r < m.rows; ++r) {
        Rat s = sv_dot(m.row[static_cast<size_t>(r)], x);
        if (s != 0) y.terms.push_back({r, s});
    }
    return y;
}

// x^T * m as a sparse row vector.
inline SparseVec vec_mat(const SparseVec& x, const RationalMatrix& m) {
    SparseVec y;
    for (const auto& [r, c] : x.terms) y = sv_axpy(y, c, m.row[static_cast<size_t>(r)]);
    return y;
}

inline RationalMatrix mat_mul(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols != b.rows)
        throw Error("mat_mul: inner dimensions disagree (" + std::to_string(a.cols) +
                    " vs " + std::to_string(b.rows) + ")");
    RationalMatrix c(a.rows, b.cols);
    for (int r = 0; r < a.rows; ++r)
        c.row[static_cast<size_t>(r)] = vec_mat(a.row[static_cast<size_t>(r)], b);
    return c;
}

inline RationalMatrix mat_add(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw Error("mat_add: shape mismatch");
    RationalMatrix c(a.rows, a.cols);
    for (int r = 0; r < a.rows; ++r)
        c.row[static_cast<size_t>(r)] =
            sv_add(a.row[static_cast<size_t>(r)], b.row[static_cast<size_t>(r)]);
    return c;
}

inline RationalMatrix mat_scale(const RationalMatrix& a, const Rat& s) {
    RationalMatrix c(a.rows, a.cols);
    for (int r = 0; r < a.rows; ++r)
        c.row[static_cast<size_t>(r)] = sv_scale(a.row[static_cast<size_t>(r)], s);
    return c;
}

// ---------------------------------------------------------------------------
// Reduced row echelon form
//
// Pivot policy: columns are processed left to right; within a column the
// pivot is the candidate entry of smallest total bit length (numerator plus
// denominator), ties broken by lowest row index. The result is the unique
// RREF either way; the policy only controls intermediate fraction growth.
// ---------------------------------------------------------------------------

struct RrefResult {
    int rank = 0;
    std::vector<int> pivots;  // pivot column per pivot row, strictly increasing
    RationalMatrix reduced;   // same shape; rows beyond rank are zero
};

inline RrefResult rref(const RationalMatrix& m) {
    std::vector<SparseVec> work = m.row;
    std::vector<size_t> remaining(work.size());
    for (size_t i = 0; i < work.size(); ++i) remaining[i] = i;

    RrefResult res;
    res.reduced = RationalMatrix(m.rows, m.cols);
    std::vector<SparseVec> done;  // pivot rows in pivot-column order

    for (int col = 0; col < m.cols; ++col) {
        // Every remaining row has its leading entry in a not-yet-processed
        // column, so candidates for this column are exactly the rows whose
        // leading index equals col.
        size_t best = SIZE_MAX;
        size_t best_bits = 0;
        for (size_t i : remaining) {
            if (work[i].leading_index() != col) continue;
            size_t bits = rat_bits(work[i].leading_coeff());
            if (best == SIZE_MAX || bits < best_bits) {
                best = i;
                best_bits = bits;
            }
        }
        if (best == SIZE_MAX) continue;

        SparseVec pivot = sv_scale(work[best], Rat(1) / work[best].leading_coeff());
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
        for (size_t i : remaining) {
            if (work[i].leading_index() == col)
                work[i] = sv_axpy(work[i], -work[i].leading_coeff(), pivot);
        }
        for (SparseVec& d : done) {
            Rat c = sv_get(d, col);
            if (c != 0) d = sv_axpy(d, -c, pivot);
        }
        done.push_back(std::move(pivot));
        res.pivots.push_back(col);
    }

    res.rank = static_cast<int>(done.size());
    for (size_t i = 0; i < done.size(); ++i) res.reduced.row[i] = std::move(done[i]);
    return res;
}

// ---------------------------------------------------------------------------
// Subspaces: canonical RREF bases
// ---------------------------------------------------------------------------

struct Subspace {
    int ambient_dim = 0;
    std::vector<SparseVec> basis;  // RREF rows
    std::vector<int> pivots;       // strictly increasing, one per basis row

    int dim() const { return static_cast<int>(basis.size()); }

    // Reduces v against the basis; remainder zero means membership.
    SparseVec reduce(const SparseVec& v) const {
        SparseVec r = v;
        for (size_t i = 0; i < basis.size(); ++i) {
            Rat c = sv_get(r, pivots[i]);
            if (c != 0) r = sv_axpy(r, -c, basis[i]);
        }
        return r;
    }
    bool contains(const SparseVec& v) const { return reduce(v).is_zero(); }

    // Coordinates of v in the RREF basis; requires membership.
    std::vector<Rat> coordinates(const SparseVec& v) const {
        if (!contains(v)) throw NotInSpan("vector is not in the subspace");
        std::vector<Rat> c;
        c.reserve(basis.size());
        for (int p : pivots) c.push_back(sv_get(v, p));
        return c;
    }

    bool operator==(const Subspace& o) const {
        return ambient_dim == o.ambient_dim && basis == o.basis;
    }
};

inline Subspace span_of(int ambient_dim, const std::vector<SparseVec>& gens) {
    RationalMatrix m(static_cast<int>(gens.size()), ambient_dim);
    m.row = gens;
    RrefResult r = rref(m);
    Subspace s;
    s.ambient_dim = ambient_dim;
    s.pivots = r.pivots;
    s.basis.assign(r.reduced.row.begin(), r.reduced.row.begin() + r.rank);
    return s;
}

// Basis of { x : m x = 0 }, returned as a canonical subspace of Q^cols.
inline Subspace kernel_basis(const RationalMatrix& m) {
    RrefResult r = rref(m);
    std::vector<bool> is_pivot(static_cast<size_t>(m.cols), false);
    for (int p : r.pivots) is_pivot[static_cast<size_t>(p)] = true;

    std::vector<SparseVec> gens;
    for (int f = 0; f < m.cols; ++f) {
        if (is_pivot[static_cast<size_t>(f)]) continue;
        SparseVec v;
        for (int i = 0; i < r.rank; ++i) {
            Rat c = sv_get(r.reduced.row[static_cast<size_t>(i)], f);
            if (c != 0) sv_set(v, r.pivots[static_cast<size_t>(i)], -c);
        }
        sv_set(v, f, Rat(1));
        gens.push_back(std::move(v));
    }
    return span_of(m.cols, gens);
}

inline Subspace full_space(int ambient_dim) {
    std::vector<SparseVec> gens;
    gens.reserve(static_cast<size_t>(ambient_dim));
    for (int i = 0; i < ambient_dim; ++i) gens.push_back(sv_unit(i));
    return span_of(ambient_dim, gens);
}

inline Subspace image_basis(const RationalMatrix& m) {
    RationalMatrix t = transpose(m);
    return span_of(m.rows, t.row);
}

inline int rank_of(const RationalMatrix& m) { return rref(m).rank; }

// ---------------------------------------------------------------------------
// Incremental echelon with expression tracking
//
// Generators are inserted one at a time; each echelon row remembers how it is
// expressed as a combination of the inserted generators. express() therefore
// recovers explicit coordinates, which powers linear solving and quotient
// coordinate maps.
// ---------------------------------------------------------------------------

struct TrackedEchelon {
    int ambient_dim = 0;
    int n_gens = 0;
    std::vector<SparseVec> rows;   // RREF rows (pivot 1, cleared above and below)
    std::vector<SparseVec> combos; // combos[i]: rows[i] as a combo of generators
    std::vector<int> pivots;

    explicit TrackedEchelon(int ambient = 0) : ambient_dim(ambient) {}

    // Inserts generator v; returns true when the rank grew.
    bool insert(const SparseVec& v) {
        int g = n_gens++;
        SparseVec r = v;
        SparseVec combo = sv_unit(g);
        for (size_t i = 0; i < rows.size(); ++i) {
            Rat c = sv_get(r, pivots[i]);
            if (c != 0) {
                r = sv_axpy(r, -c, rows[i]);
                combo = sv_axpy(combo, -c, combos[i]);
            }
        }
        if (r.is_zero()) return false;

        Rat inv = Rat(1) / r.leading_coeff();
        int p = r.leading_index();
        r = sv_scale(r, inv);
        combo = sv_scale(combo, inv);
        for (size_t i = 0; i < rows.size(); ++i) {
            Rat c = sv_get(rows[i], p);
            if (c != 0) {
                rows[i] = sv_axpy(rows[i], -c, r);
                combos[i] = sv_axpy(combos[i], -c, combo);
            }
        }
        size_t pos = 0;
        while (pos < pivots.size() && pivots[pos] < p) ++pos;
        rows.insert(rows.begin() + static_cast<long>(pos), std::move(r));
        combos.insert(combos.begin() + static_cast<long>(pos), std::move(combo));
        pivots.insert(pivots.begin() + static_cast<long>(pos), p);
        return true;
    }

    int rank() const { return static_cast<int>(rows.size()); }

    // Coordinates of v over the inserted generators (indices 0..n_gens-1), or
    // nullopt when v is outside the span. Generators that did not grow the
    // rank never appear in the result, so the expression is deterministic.
    std::optional<SparseVec> express(const SparseVec& v) const {
        SparseVec r = v;
        SparseVec acc;
        for (size_t i = 0; i < rows.size(); ++i) {
            Rat c = sv_get(r, pivots[i]);
            if (c != 0) {
                r = sv_axpy(r, -c, rows[i]);
                acc = sv_axpy(acc, c, combos[i]);
            }
        }
        if (!r.is_zero()) return std::nullopt;
        return acc;
    }

    bool in_span(const SparseVec& v) const {
        SparseVec r = v;
        for (size_t i = 0; i < rows.size(); ++i) {
            Rat c = sv_get(r, pivots[i]);
            if (c != 0) r = sv_axpy(r, -c, rows[i]);
        }
        return r.is_zero();
    }
};

// Reusable solver for m x = b, built on the column span of m.
struct ColumnSolver {
    TrackedEchelon ech;
    explicit ColumnSolver(const RationalMatrix& m) : ech(m.rows) {
        RationalMatrix t = transpose(m);
        for (const auto& col : t.row) ech.insert(col);
    }
    std::optional<SparseVec> solve(const SparseVec& b) const { return ech.express(b); }
};

// ---------------------------------------------------------------------------
// Quotient coordinates big / sub
// ---------------------------------------------------------------------------

struct QuotientMap {
    int ambient_dim = 0;
    TrackedEchelon ech;            // sub generators first, then big basis
    std::vector<int> class_gens;   // generator indices that represent classes
    std::vector<SparseVec> reps;   // one representative vector per class

    QuotientMap() : ech(0) {}

    int dim() const { return static_cast<int>(class_gens.size()); }

    // Class coordinates of v in the quotient; v must lie in the big space.
    std::vector<Rat> coords(const SparseVec& v) const {
        auto e = ech.express(v);
        if (!e) throw NotInSpan("vector is not in the space being quotiented");
        std::vector<Rat> c(class_gens.size(), Rat(0));
        for (size_t k = 0; k < class_gens.size(); ++k)
            c[k] = sv_get(*e, class_gens[k]);
        return c;
    }
};

// Coordinate map for big/sub. Throws NotASubspace when sub is not contained
// in big (the witness names the first offending basis vector).
inline QuotientMap quotient_coordinates(const Subspace& sub, const Subspace& big) {
    if (sub.ambient_dim != big.ambient_dim)
        throw NotASubspace("ambient dimensions disagree: " +
                           std::to_string(sub.ambient_dim) + " vs " +
                           std::to_string(big.ambient_dim));
    for (size_t i = 0; i < sub.basis.size(); ++i)
        if (!big.contains(sub.basis[i]))
            throw NotASubspace("basis vector " + std::to_string(i) +
                               " of the would-be subspace is outside the big space");
    QuotientMap q;
    q.ambient_dim = big.ambient_dim;
    q.ech = TrackedEchelon(big.ambient_dim);
    for (const auto& v : sub.basis) q.ech.insert(v);
    int gen_index = static_cast<int>(sub.basis.size());
    for (const auto& v : big.basis) {
        if (q.ech.insert(v)) {
            q.class_gens.push_back(gen_index);
            q.reps.push_back(v);
        }
        ++gen_index;
    }
    return q;
}

// ---------------------------------------------------------------------------
// Intersection of a span with a coordinate subspace
//
// Returns the subspace of span(gens) supported entirely on coordinates where
// allowed[i] is true. Combinations killing the forbidden coordinates are the
// kernel of the generators restricted to those coordinates.
// ---------------------------------------------------------------------------

inline Subspace intersect_with_allowed(int ambient_dim,
                                       const std::vector<SparseVec>& gens,
                                       const std::vector<bool>& allowed) {
    std::vector<int> forbidden;
    for (int i = 0; i < ambient_dim; ++i)
        if (!allowed[static_cast<size_t>(i)]) forbidden.push_back(i);

    // restricted(g) has one coordinate per forbidden index
    RationalMatrix restricted(static_cast<int>(gens.size()),
                              static_cast<int>(forbidden.size()));
    for (size_t g = 0; g < gens.size(); ++g)
        for (size_t f = 0; f < forbidden.size(); ++f) {
            Rat v = sv_get(gens[g], forbidden[f]);
            if (v != 0) restricted.row[g].terms.push_back({static_cast<int>(f), v});
        }

    Subspace combos = kernel_basis(transpose(restricted));
    std::vector<SparseVec> out;
    for (const auto& c : combos.basis) {
        SparseVec v;
        for (const auto& [g, coeff] : c.terms)
            v = sv_axpy(v, coeff, gens[static_cast<size_t>(g)]);
        if (!v.is_zero()) out.push_back(std::move(v));
    }
    return span_of(ambient_dim, out);
}

inline Subspace subspace_sum(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim != b.ambient_dim) throw Error("subspace_sum: ambient mismatch");
    std::vector<SparseVec> gens = a.basis;
    gens.insert(gens.end(), b.basis.begin(), b.basis.end());
    return span_of(a.ambient_dim, gens);
}

inline Subspace subspace_intersection(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw Error("subspace_intersection: ambient mismatch");
    // x in both spans: x = u A = v B; kernel of [A^T | -B^T] gives (u, v).
    RationalMatrix stacked(a.ambient_dim, a.dim() + b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (const auto& [r, val] : a.basis[static_cast<size_t>(i)].terms)
            stacked.row[static_cast<size_t>(r)].terms.push_back({i, val});
    for (int j = 0; j < b.dim(); ++j)
        for (const auto& [r, val] : b.basis[static_cast<size_t>(j)].terms)
            stacked.row[static_cast<size_t>(r)].terms.push_back({a.dim() + j, -val});
    for (auto& row : stacked.row)
        std::sort(row.terms.begin(), row.terms.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });

    Subspace combos = kernel_basis(stacked);
    std::vector<SparseVec> gens;
    for (const auto& c : combos.basis) {
        SparseVec x;
        for (const auto& [idx, coeff] : c.terms) {
            if (idx < a.dim()) x = sv_axpy(x, coeff, a.basis[static_cast<size_t>(idx)]);
        }
        if (!x.is_zero()) gens.push_back(std::move(x));
    }
    return span_of(a.ambient_dim, gens);
}

} // namespace gaugeloc
