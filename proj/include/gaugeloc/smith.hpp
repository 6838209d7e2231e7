#pragma once

#include <cstdlib>
#include <string>
#include <vector>

#include <gaugeloc/matrix.hpp>
#include <gaugeloc/rational.hpp>

namespace gaugeloc {

// ---------------------------------------------------------------------------
// Dense integer matrices (only used for Smith normal form and lattices; the
// rational sparse machinery handles everything else)
// ---------------------------------------------------------------------------

struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<Int>> a;

    IntMatrix() = default;
    IntMatrix(int r, int c)
        : rows(r), cols(c), a(static_cast<size_t>(r), std::vector<Int>(static_cast<size_t>(c), Int(0))) {}

    static IntMatrix identity(int n) {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.a[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
        return m;
    }

    Int& at(int r, int c) { return a[static_cast<size_t>(r)][static_cast<size_t>(c)]; }
    const Int& at(int r, int c) const { return a[static_cast<size_t>(r)][static_cast<size_t>(c)]; }

    bool operator==(const IntMatrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
};

inline IntMatrix int_mat_mul(const IntMatrix& x, const IntMatrix& y) {
    if (x.cols != y.rows) throw Error("int_mat_mul: inner dimensions disagree");
    IntMatrix z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Int& v = x.at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < y.cols; ++j) {
                const Int& w = y.at(k, j);
                if (w != 0) z.at(i, j) += v * w;
            }
        }
    return z;
}

// Exact conversion; throws when an entry is not an integer.
inline IntMatrix int_mat_from_rational(const RationalMatrix& m) {
    IntMatrix z(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r)
        for (const auto& [c, v] : m.row[static_cast<size_t>(r)].terms) {
            if (!rat_is_integer(v))
                throw Error("int_mat_from_rational: entry " + rat_to_string(v) +
                            " at (" + std::to_string(r) + "," + std::to_string(c) +
                            ") is not an integer");
            z.at(r, c) = v.get_num();
        }
    return z;
}

inline RationalMatrix rational_from_int_mat(const IntMatrix& m) {
    RationalMatrix z(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            if (m.at(r, c) != 0) z.row[static_cast<size_t>(r)].terms.push_back({c, Rat(m.at(r, c))});
    return z;
}

// ---------------------------------------------------------------------------
// Smith normal form
//
// Returns unimodular U, V with U * input * V = D diagonal, every d_i >= 0 and
// d_i | d_{i+1}. Inverses of U and V are tracked alongside so callers can
// read off lattice bases without a separate inversion.
// ---------------------------------------------------------------------------

struct SnfResult {
    IntMatrix u, d, v;
    IntMatrix u_inv, v_inv;
    std::vector<Int> divisors; // nonzero diagonal entries of d, in order
    int rank = 0;
};

namespace detail {

struct SnfWorker {
    IntMatrix a, u, uinv, v, vinv;

    explicit SnfWorker(const IntMatrix& m)
        : a(m),
          u(IntMatrix::identity(m.rows)),
          uinv(IntMatrix::identity(m.rows)),
          v(IntMatrix::identity(m.cols)),
          vinv(IntMatrix::identity(m.cols)) {}

    void row_swap(int i, int j) {
        if (i == j) return;
        std::swap(a.a[static_cast<size_t>(i)], a.a[static_cast<size_t>(j)]);
        std::swap(u.a[static_cast<size_t>(i)], u.a[static_cast<size_t>(j)]);
        for (int r = 0; r < uinv.rows; ++r) std::swap(uinv.at(r, i), uinv.at(r, j));
    }
    // row_i += q * row_j
    void row_addmul(int i, int j, const Int& q) {
        if (q == 0) return;
        for (int c = 0; c < a.cols; ++c) a.at(i, c) += q * a.at(j, c);
        for (int c = 0; c < u.cols; ++c) u.at(i, c) += q * u.at(j, c);
        for (int r = 0; r < uinv.rows; ++r) uinv.at(r, j) -= q * uinv.at(r, i);
    }
    void row_negate(int i) {
        for (int c = 0; c < a.cols; ++c) a.at(i, c) = -a.at(i, c);
        for (int c = 0; c < u.cols; ++c) u.at(i, c) = -u.at(i, c);
        for (int r = 0; r < uinv.rows; ++r) uinv.at(r, i) = -uinv.at(r, i);
    }
    void col_swap(int i, int j) {
        if (i == j) return;
        for (int r = 0; r < a.rows; ++r) std::swap(a.at(r, i), a.at(r, j));
        for (int r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
        std::swap(vinv.a[static_cast<size_t>(i)], vinv.a[static_cast<size_t>(j)]);
    }
    // col_i += q * col_j
    void col_addmul(int i, int j, const Int& q) {
        if (q == 0) return;
        for (int r = 0; r < a.rows; ++r) a.at(r, i) += q * a.at(r, j);
        for (int r = 0; r < v.rows; ++r) v.at(r, i) += q * v.at(r, j);
        for (int c = 0; c < vinv.cols; ++c) vinv.at(j, c) -= q * vinv.at(i, c);
    }

    // Euclidean clearing of row t and column t until only a(t,t) survives.
    void clear_cross(int t) {
        while (true) {
            // column t below the pivot
            for (int i = t + 1; i < a.rows; ++i) {
                while (a.at(i, t) != 0) {
                    if (a.at(t, t) == 0) {
                        row_swap(i, t);
                        continue;
                    }
                    Int q;
                    mpz_tdiv_q(q.get_mpz_t(), a.at(i, t).get_mpz_t(), a.at(t, t).get_mpz_t());
                    row_addmul(i, t, -q);
                    if (a.at(i, t) != 0) row_swap(i, t); // remainder is strictly smaller
                }
            }
            // row t right of the pivot
            for (int j = t + 1; j < a.cols; ++j) {
                while (a.at(t, j) != 0) {
                    if (a.at(t, t) == 0) {
                        col_swap(j, t);
                        continue;
                    }
                    Int q;
                    mpz_tdiv_q(q.get_mpz_t(), a.at(t, j).get_mpz_t(), a.at(t, t).get_mpz_t());
                    col_addmul(j, t, -q);
                    if (a.at(t, j) != 0) col_swap(j, t);
                }
            }
            bool col_clear = true;
            for (int i = t + 1; i < a.rows && col_clear; ++i)
                if (a.at(i, t) != 0) col_clear = false;
            if (col_clear) break; // column swaps above may have re-dirtied it
        }
    }

    // Picks the smallest-magnitude nonzero entry in the active block as the
    // pivot (ties: lowest column, then lowest row) and moves it to (t, t).
    bool select_pivot(int t) {
        int bi = -1, bj = -1;
        Int best;
        for (int j = t; j < a.cols; ++j) {
            for (int i = t; i < a.rows; ++i) {
                const Int& x = a.at(i, j);
                if (x == 0) continue;
                Int ax = abs(x);
                if (bi == -1 || ax < best) {
                    bi = i;
                    bj = j;
                    best = ax;
                    if (best == 1) break;
                }
            }
            if (best == 1) break;
        }
        if (bi == -1) return false;
        row_swap(bi, t);
        col_swap(bj, t);
        return true;
    }

    void run() {
        int limit = std::min(a.rows, a.cols);
        int t = 0;
        for (; t < limit; ++t) {
            if (!select_pivot(t)) break;
            clear_cross(t);
            if (a.at(t, t) < 0) row_negate(t);
        }
        // divisibility chain d_i | d_{i+1}
        bool fixed = true;
        while (fixed) {
            fixed = false;
            for (int i = 0; i + 1 < t && !fixed; ++i) {
                for (int l = i + 1; l < t && !fixed; ++l) {
                    if (a.at(l, l) % a.at(i, i) != 0) {
                        col_addmul(i, l, Int(1)); // a(l, i) := d_l
                        clear_cross(i);           // new d_i = gcd(d_i, d_l)
                        if (a.at(i, i) < 0) row_negate(i);
                        if (a.at(l, l) < 0) row_negate(l);
                        fixed = true;
                    }
                }
            }
        }
    }
};

} // namespace detail

inline SnfResult smith_normal_form(const IntMatrix& m) {
    detail::SnfWorker w(m);
    w.run();
    SnfResult res;
    res.d = w.a;
    res.u = w.u;
    res.v = w.v;
    res.u_inv = w.uinv;
    res.v_inv = w.vinv;
    int limit = std::min(m.rows, m.cols);
    for (int i = 0; i < limit; ++i) {
        if (res.d.at(i, i) != 0) res.divisors.push_back(res.d.at(i, i));
    }
    res.rank = static_cast<int>(res.divisors.size());
    return res;
}

inline SnfResult smith_normal_form(const RationalMatrix& m) {
    return smith_normal_form(int_mat_from_rational(m));
}

// Recomputes U * input * V and checks it equals D, that D is diagonal with a
// divisibility chain, and that U, V are unimodular (inverse products give
// identity). Tests call this on every Smith decomposition they rely on.
inline bool snf_verify(const IntMatrix& input, const SnfResult& r, std::string* why = nullptr) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    IntMatrix prod = int_mat_mul(int_mat_mul(r.u, input), r.v);
    if (!(prod == r.d)) return fail("U*A*V differs from D");
    for (int i = 0; i < r.d.rows; ++i)
        for (int j = 0; j < r.d.cols; ++j)
            if (i != j && r.d.at(i, j) != 0) return fail("D has an off-diagonal entry");
    int limit = std::min(r.d.rows, r.d.cols);
    for (int i = 0; i + 1 < limit; ++i) {
        const Int& a = r.d.at(i, i);
        const Int& b = r.d.at(i + 1, i + 1);
        if (a == 0 && b != 0) return fail("zero divisor precedes a nonzero one");
        if (a != 0 && b % a != 0) return fail("divisor chain broken at index " + std::to_string(i));
        if (a < 0) return fail("negative divisor");
    }
    if (!(int_mat_mul(r.u, r.u_inv) == IntMatrix::identity(input.rows)))
        return fail("U * U^-1 is not the identity");
    if (!(int_mat_mul(r.v, r.v_inv) == IntMatrix::identity(input.cols)))
        return fail("V * V^-1 is not the identity");
    return true;
}

// ---------------------------------------------------------------------------
// Integer lattices inside Q^n
// ---------------------------------------------------------------------------

struct IntegerLattice {
    int ambient_dim = 0;
    std::vector<SparseVec> basis;   // integer entries, one vector per rank
    std::vector<Int> snf_certificate; // elementary divisors of the generator matrix

    int rank() const { return static_cast<int>(basis.size()); }
};

// Lattice spanned over the integers by the given integer vectors. The basis
// is extracted from the Smith decomposition of the generator matrix, so it is
// a genuine Z-basis with the certificate recorded.
inline IntegerLattice lattice_from_generators(int ambient_dim,
                                              const std::vector<SparseVec>& gens) {
    IntMatrix g(ambient_dim, static_cast<int>(gens.size()));
    for (size_t k = 0; k < gens.size(); ++k)
        for (const auto& [i, val] : gens[k].terms) {
            if (!rat_is_integer(val))
                throw Error("lattice_from_generators: generator " + std::to_string(k) +
                            " has non-integer entry " + rat_to_string(val));
            g.at(i, static_cast<int>(k)) = val.get_num();
        }
    SnfResult s = smith_normal_form(g);
    // Columns of the matrix are U^-1 D V^-1 applied to Z^k, i.e. the lattice
    // is spanned by d_i times column i of U^-1.
    IntegerLattice lat;
    lat.ambient_dim = ambient_dim;
    lat.snf_certificate = s.divisors;
    for (int i = 0; i < s.rank; ++i) {
        SparseVec b;
        for (int r = 0; r < ambient_dim; ++r) {
            Int x = s.divisors[static_cast<size_t>(i)] * s.u_inv.at(r, i);
            if (x != 0) b.terms.push_back({r, Rat(x)});
        }
        lat.basis.push_back(std::move(b));
    }
    return lat;
}

struct LatticeMembership {
    bool member = false;
    std::vector<Rat> coords; // all integers when member; the fractional witness otherwise
};

// Decides whether v lies in the lattice. Requires v to be in the rational
// span (otherwise NotInSpan); a non-member comes back with its fractional
// coordinates as the witness.
inline LatticeMembership lattice_membership(const IntegerLattice& lat, const SparseVec& v) {
    TrackedEchelon ech(lat.ambient_dim);
    for (const auto& b : lat.basis) ech.insert(b);
    auto e = ech.express(v);
    if (!e) throw NotInSpan("vector is outside the rational span of the lattice");
    LatticeMembership res;
    res.coords.assign(static_cast<size_t>(lat.rank()), Rat(0));
    for (const auto& [g, c] : e->terms) res.coords[static_cast<size_t>(g)] = c;
    res.member = true;
    for (const auto& c : res.coords)
        if (!rat_is_integer(c)) res.member = false;
    return res;
}

} // namespace gaugeloc
