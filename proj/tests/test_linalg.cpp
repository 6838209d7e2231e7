#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <gaugeloc/matrix.hpp>
#include <gaugeloc/smith.hpp>

using namespace gaugeloc;

namespace {

RationalMatrix from_dense(std::vector<std::vector<long>> rows, int cols = -1) {
    int c = cols >= 0 ? cols : (rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    RationalMatrix m(static_cast<int>(rows.size()), c);
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t j = 0; j < rows[r].size(); ++j)
            if (rows[r][j] != 0) m.set(static_cast<int>(r), static_cast<int>(j), rat(rows[r][j]));
    return m;
}

SparseVec vec(std::vector<Rat> entries) { return sv_from_dense(entries); }

// Invariant of the sparse representation: sorted indices, no stored zeros.
bool well_formed(const RationalMatrix& m) {
    for (const auto& r : m.row) {
        for (size_t i = 0; i < r.terms.size(); ++i) {
            if (r.terms[i].second == 0) return false;
            if (i > 0 && r.terms[i - 1].first >= r.terms[i].first) return false;
            if (r.terms[i].first < 0 || r.terms[i].first >= m.cols) return false;
        }
    }
    return true;
}

RationalMatrix random_matrix(std::mt19937& rng, int rows, int cols) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    std::uniform_int_distribution<int> keep(0, 2);
    RationalMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (keep(rng) == 0) m.set(r, c, rat(num(rng), den(rng)));
    return m;
}

} // namespace

TEST_CASE("sparse vector arithmetic keeps canonical form") {
    SparseVec a = vec({rat(1), rat(0), rat(-2)});
    SparseVec b = vec({rat(-1), rat(3), rat(2)});
    SparseVec s = sv_add(a, b);
    REQUIRE(s == vec({rat(0), rat(3), rat(0)}));
    REQUIRE(s.terms.size() == 1); // cancelled entries must disappear
    REQUIRE(sv_dot(a, b) == rat(-5));
    REQUIRE(sv_axpy(a, rat(2), b) == vec({rat(-1), rat(6), rat(2)}));
}

TEST_CASE("rational wire format round-trips") {
    REQUIRE(rat_to_string(rat(3)) == "3/1");
    REQUIRE(rat_to_string(rat(-10, 4)) == "-5/2");
    REQUIRE(rat_to_string(rat(0)) == "0/1");
    REQUIRE(rat_from_string("7/3") == rat(7, 3));
    REQUIRE(rat_from_string("-4/6") == rat(-2, 3));
    REQUIRE(rat_from_string("5") == rat(5));
    REQUIRE_THROWS_AS(rat_from_string("1/0"), ValidationError);
    REQUIRE_THROWS_AS(rat_from_string("a/b"), ValidationError);
    REQUIRE_THROWS_AS(rat_from_string(""), ValidationError);
}

TEST_CASE("rref on a rank-deficient matrix") {
    // [[1,2],[2,4]] has rank 1 with pivot column 0.
    RationalMatrix m = from_dense({{1, 2}, {2, 4}});
    RrefResult r = rref(m);
    REQUIRE(r.rank == 1);
    REQUIRE(r.pivots == std::vector<int>{0});
    REQUIRE(r.reduced.at(0, 0) == rat(1));
    REQUIRE(r.reduced.at(0, 1) == rat(2));
    REQUIRE(r.reduced.row[1].is_zero());
    REQUIRE(well_formed(r.reduced));
}

TEST_CASE("rref basics: identity, zero, idempotence") {
    RationalMatrix id = RationalMatrix::identity(4);
    RrefResult r = rref(id);
    REQUIRE(r.rank == 4);
    REQUIRE(r.reduced == id);

    RationalMatrix z(3, 5);
    REQUIRE(rref(z).rank == 0);
    REQUIRE(rref(z).reduced.is_zero());

    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        RationalMatrix m = random_matrix(rng, 5, 7);
        RrefResult once = rref(m);
        RrefResult twice = rref(once.reduced);
        REQUIRE(once.reduced == twice.reduced); // RREF is a fixed point
        REQUIRE(once.pivots == twice.pivots);
        REQUIRE(well_formed(once.reduced));
        // pivot columns carry unit vectors
        for (int i = 0; i < once.rank; ++i) {
            for (int j = 0; j < once.rank; ++j) {
                Rat expect = (i == j) ? rat(1) : rat(0);
                REQUIRE(once.reduced.at(j, once.pivots[static_cast<size_t>(i)]) == expect);
            }
        }
    }
}

TEST_CASE("rank-nullity across random matrices") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        RationalMatrix m = random_matrix(rng, 4 + trial % 3, 5 + trial % 4);
        RrefResult r = rref(m);
        Subspace k = kernel_basis(m);
        REQUIRE(r.rank + k.dim() == m.cols);
        for (const auto& v : k.basis) REQUIRE(mat_vec(m, v).is_zero());
        REQUIRE(rank_of(transpose(m)) == r.rank);
    }
}

TEST_CASE("kernel basis is canonical echelon") {
    RationalMatrix m = from_dense({{1, 1, 0}, {0, 0, 1}});
    Subspace k = kernel_basis(m);
    REQUIRE(k.dim() == 1);
    REQUIRE(k.basis[0] == vec({rat(1), rat(-1), rat(0)}));
    REQUIRE(k.pivots == std::vector<int>{0});
}

TEST_CASE("tracked echelon expresses vectors over its generators") {
    TrackedEchelon ech(3);
    REQUIRE(ech.insert(vec({rat(1), rat(1), rat(0)})));
    REQUIRE(ech.insert(vec({rat(0), rat(1), rat(1)})));
    REQUIRE_FALSE(ech.insert(vec({rat(1), rat(2), rat(1)}))); // dependent
    REQUIRE(ech.n_gens == 3);
    REQUIRE(ech.rank() == 2);

    auto e = ech.express(vec({rat(2), rat(5), rat(3)}));
    REQUIRE(e.has_value());
    // coordinates refer to generators 0 and 1 only
    REQUIRE(sv_get(*e, 0) == rat(2));
    REQUIRE(sv_get(*e, 1) == rat(3));
    REQUIRE(sv_get(*e, 2) == rat(0));
    REQUIRE_FALSE(ech.express(vec({rat(1), rat(0), rat(0)})).has_value());
}

TEST_CASE("column solver inverts matrix application") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        RationalMatrix m = random_matrix(rng, 6, 4);
        ColumnSolver solver(m);
        SparseVec x = vec({rat(1, 2), rat(-3), rat(0), rat(5, 7)});
        SparseVec b = mat_vec(m, x);
        auto sol = solver.solve(b);
        REQUIRE(sol.has_value());
        REQUIRE(mat_vec(m, *sol) == b); // some preimage, exactly
    }
}

TEST_CASE("quotient coordinates match hand computation in the plane") {
    // big = Q^2, sub = span{(1,1)}; classes are represented by e0 and
    // [(1,0)] = [(0,-1)] since their difference is (1,1).
    Subspace big = span_of(2, {sv_unit(0), sv_unit(1)});
    Subspace sub = span_of(2, {vec({rat(1), rat(1)})});
    QuotientMap q = quotient_coordinates(sub, big);
    REQUIRE(q.dim() == 1);

    auto a = q.coords(vec({rat(1), rat(0)}));
    auto b = q.coords(vec({rat(0), rat(-1)}));
    auto c = q.coords(vec({rat(0), rat(1)}));
    REQUIRE(a == b);
    REQUIRE(a[0] == -c[0]);
    REQUIRE(q.coords(vec({rat(1), rat(1)}))[0] == rat(0)); // sub maps to zero
}

TEST_CASE("quotient refuses a non-subspace") {
    Subspace big = span_of(3, {sv_unit(0), sv_unit(1)});
    Subspace bad = span_of(3, {sv_unit(2)});
    REQUIRE_THROWS_AS(quotient_coordinates(bad, big), NotASubspace);
    QuotientMap q = quotient_coordinates(span_of(3, {sv_unit(0)}), big);
    REQUIRE_THROWS_AS(q.coords(sv_unit(2)), NotInSpan);
}

TEST_CASE("quotient dimensions on random data") {
    std::mt19937 rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        RationalMatrix m = random_matrix(rng, 5, 6);
        Subspace big = image_basis(transpose(m)); // span of rows, ambient 6
        if (big.dim() == 0) continue;
        std::vector<SparseVec> subgens(big.basis.begin(),
                                       big.basis.begin() + (1 + trial % big.dim()));
        Subspace sub = span_of(6, subgens);
        QuotientMap q = quotient_coordinates(sub, big);
        REQUIRE(q.dim() == big.dim() - sub.dim());
        for (const auto& v : sub.basis) {
            auto cs = q.coords(v);
            for (const auto& cv : cs) REQUIRE(cv == rat(0));
        }
    }
}

TEST_CASE("intersection with coordinate subspace") {
    // span{(1,1,0),(0,1,1)} meets {x2 = 0} in span{(1,1,0)} and meets
    // {x1 = x2 = 0} trivially.
    std::vector<SparseVec> gens = {vec({rat(1), rat(1), rat(0)}), vec({rat(0), rat(1), rat(1)})};
    Subspace a = intersect_with_allowed(3, gens, {true, true, false});
    REQUIRE(a.dim() == 1);
    REQUIRE(a.basis[0] == vec({rat(1), rat(1), rat(0)}));
    Subspace b = intersect_with_allowed(3, gens, {true, false, false});
    REQUIRE(b.dim() == 0);
}

TEST_CASE("subspace sum and intersection satisfy the dimension formula") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        RationalMatrix m1 = random_matrix(rng, 3, 6);
        RationalMatrix m2 = random_matrix(rng, 3, 6);
        Subspace a = span_of(6, m1.row);
        Subspace b = span_of(6, m2.row);
        Subspace s = subspace_sum(a, b);
        Subspace i = subspace_intersection(a, b);
        REQUIRE(s.dim() + i.dim() == a.dim() + b.dim());
        for (const auto& v : i.basis) {
            REQUIRE(a.contains(v));
            REQUIRE(b.contains(v));
        }
    }
}

TEST_CASE("smith normal form on pinned examples") {
    SECTION("diag(2,3) has divisors 1,6") {
        IntMatrix m(2, 2);
        m.at(0, 0) = 2;
        m.at(1, 1) = 3;
        SnfResult s = smith_normal_form(m);
        REQUIRE(s.divisors == std::vector<Int>{Int(1), Int(6)});
        std::string why;
        REQUIRE(snf_verify(m, s, &why));
    }
    SECTION("[[2,4],[6,8]] has divisors 2,4") {
        IntMatrix m(2, 2);
        m.at(0, 0) = 2;
        m.at(0, 1) = 4;
        m.at(1, 0) = 6;
        m.at(1, 1) = 8;
        SnfResult s = smith_normal_form(m);
        REQUIRE(s.divisors == std::vector<Int>{Int(2), Int(4)});
        std::string why;
        REQUIRE(snf_verify(m, s, &why));
    }
}

TEST_CASE("smith normal form survives random integer matrices") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> entry(-9, 9);
    std::uniform_int_distribution<int> dim(1, 6);
    for (int trial = 0; trial < 60; ++trial) {
        IntMatrix m(dim(rng), dim(rng));
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c)
                if (entry(rng) > 3) m.at(r, c) = entry(rng);
        SnfResult s = smith_normal_form(m);
        std::string why;
        INFO(why);
        REQUIRE(snf_verify(m, s, &why));
        REQUIRE(s.rank == rank_of(rational_from_int_mat(m)));
    }
}

TEST_CASE("lattice membership with integer coordinates or witness") {
    // L = Z(2,0) + Z(0,2). (2,2) is a member with coordinates (1,1);
    // (1,0) has fractional witness (1/2, 0).
    IntegerLattice lat = lattice_from_generators(
        2, {vec({rat(2), rat(0)}), vec({rat(0), rat(2)})});
    REQUIRE(lat.rank() == 2);

    LatticeMembership in = lattice_membership(lat, vec({rat(2), rat(2)}));
    REQUIRE(in.member);
    REQUIRE(in.coords == std::vector<Rat>{rat(1), rat(1)});

    LatticeMembership out = lattice_membership(lat, vec({rat(1), rat(0)}));
    REQUIRE_FALSE(out.member);
    REQUIRE(out.coords == std::vector<Rat>{rat(1, 2), rat(0)});
}

TEST_CASE("lattice membership refuses vectors outside the rational span") {
    IntegerLattice lat = lattice_from_generators(3, {vec({rat(1), rat(1), rat(0)})});
    REQUIRE_THROWS_AS(lattice_membership(lat, sv_unit(2)), NotInSpan);
}

TEST_CASE("lattice basis from redundant generators is a true Z-basis") {
    // generators (2,0), (0,2), (2,2): the lattice is still 2Z x 2Z
    IntegerLattice lat = lattice_from_generators(
        2, {vec({rat(2), rat(0)}), vec({rat(0), rat(2)}), vec({rat(2), rat(2)})});
    REQUIRE(lat.rank() == 2);
    REQUIRE(lattice_membership(lat, vec({rat(2), rat(0)})).member);
    REQUIRE(lattice_membership(lat, vec({rat(0), rat(2)})).member);
    REQUIRE_FALSE(lattice_membership(lat, vec({rat(1), rat(1)})).member);
}

// Brute-force cross-check: enumerate small integer combinations of the basis
// and confirm membership decisions agree with the solver.
TEST_CASE("lattice membership agrees with explicit enumeration") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int trial = 0; trial < 15; ++trial) {
        int ambient = 2 + trial % 2; // ambient 2 or 3
        int ngens = 1 + trial % 3;
        std::vector<SparseVec> gens;
        for (int g = 0; g < ngens; ++g) {
            std::vector<Rat> d(static_cast<size_t>(ambient));
            for (auto& x : d) x = rat(entry(rng));
            gens.push_back(sv_from_dense(d));
        }
        IntegerLattice lat;
        try {
            lat = lattice_from_generators(ambient, gens);
        } catch (const Error&) {
            continue;
        }
        if (lat.rank() == 0) continue;

        // every small combination of basis vectors must be a member
        std::vector<int> combo(static_cast<size_t>(lat.rank()), -2);
        bool more = true;
        while (more) {
            SparseVec v;
            for (int i = 0; i < lat.rank(); ++i)
                v = sv_axpy(v, rat(combo[static_cast<size_t>(i)]), lat.basis[static_cast<size_t>(i)]);
            REQUIRE(lattice_membership(lat, v).member);
            // basis vector halves must not be members unless representable
            more = false;
            for (size_t i = 0; i < combo.size(); ++i) {
                if (combo[i] < 2) {
                    ++combo[i];
                    for (size_t j = 0; j < i; ++j) combo[j] = -2;
                    more = true;
                    break;
                }
            }
        }
        // a strictly fractional coordinate vector must be rejected
        SparseVec half = sv_scale(lat.basis[0], rat(1, 2));
        LatticeMembership m = lattice_membership(lat, half);
        REQUIRE_FALSE(m.member);
        REQUIRE(m.coords[0] == rat(1, 2));
    }
}
