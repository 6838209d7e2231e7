#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <gaugeloc/complex.hpp>

using namespace gaugeloc;

namespace {

ComplexPtr cylinder(int T = 6, int n = 8, Rat hs = Rat(1)) {
    ComplexSpec spec;
    spec.time = time_axis(T);
    spec.components.push_back({{circle_axis(n, hs)}, {}});
    return build_complex(spec);
}

ComplexPtr small_box() { // time I(1) x space I(1)
    ComplexSpec spec;
    spec.time = time_axis(1);
    spec.components.push_back({{interval_axis(1)}, {}});
    return build_complex(spec);
}

ComplexPtr punctured_plane(int T, int n, std::vector<std::vector<int>> holes) {
    ComplexSpec spec;
    spec.time = time_axis(T);
    spec.components.push_back({{interval_axis(n), interval_axis(n)}, std::move(holes)});
    return build_complex(spec);
}

// global id of a cell from its factors; spatial factors are (is_edge, index)
int cid(const ComplexPtr& c, int comp, bool time_edge, int t,
        std::vector<std::pair<bool, int>> factors) {
    SpatialCell sc;
    for (size_t a = 0; a < factors.size(); ++a) {
        if (factors[a].first) sc.edge_mask |= (1u << a);
        sc.idx[a] = factors[a].second;
    }
    int sdeg = __builtin_popcount(sc.edge_mask);
    int local = c->comps[static_cast<size_t>(comp)].find(sdeg, pack_cell(sc));
    REQUIRE(local >= 0);
    CellRef r;
    r.degree = sdeg + (time_edge ? 1 : 0);
    r.time_edge = time_edge;
    r.t = t;
    r.comp = comp;
    r.sp = local;
    return c->encode(r);
}

Cochain unit(const ComplexPtr& c, int k, int gid) {
    return make_cochain(c, k, sv_unit(gid));
}

Cochain random_cochain(const ComplexPtr& c, int k, const SupportSystem& s, std::mt19937& rng,
                       int density_pct = 30) {
    std::uniform_int_distribution<int> num(-5, 5);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> pct(0, 99);
    SparseVec v;
    for (int gid : allowed_cells(*c, k, s))
        if (pct(rng) < density_pct) {
            Rat x = rat(num(rng), den(rng));
            if (x != 0) v.terms.push_back({gid, x});
        }
    return make_cochain(c, k, v);
}

// projected codifferential applied to a cochain: mask, apply, mask
Cochain delta_s(const Cochain& w, const SupportSystem& s) {
    auto mask = allowed_mask(*w.complex, w.degree - 1, s);
    Cochain out = apply_delta(w);
    SparseVec masked;
    for (const auto& [gid, v] : out.values.terms)
        if (mask[static_cast<size_t>(gid)]) masked.terms.push_back({gid, v});
    out.values = masked;
    return out;
}

const SupportSystem all_supports[4] = {supp_unrestricted, supp_tc, supp_sc, supp_c};

} // namespace

TEST_CASE("cell counts of the cylinder complex") {
    ComplexPtr c = cylinder();
    REQUIRE(c->m == 2);
    REQUIRE(c->n_cells[0] == 56);  // 7 time vertices x 8 spatial vertices
    REQUIRE(c->n_cells[1] == 104); // 7*8 spatial edges + 6*8 time edges
    REQUIRE(c->n_cells[2] == 48);  // 6*8
}

TEST_CASE("cell counts of the unit box") {
    ComplexPtr c = small_box();
    REQUIRE(c->n_cells[0] == 4);
    REQUIRE(c->n_cells[1] == 4);
    REQUIRE(c->n_cells[2] == 1);
}

TEST_CASE("deleting a central 2x2 block leaves 32 spatial tops") {
    ComplexPtr c = punctured_plane(1, 6, {{2, 2}, {2, 3}, {3, 2}, {3, 3}});
    REQUIRE(c->comps[0].cells[2].size() == 32);
}

TEST_CASE("bad specs are refused with a reason") {
    ComplexSpec s1;
    s1.time = interval_axis(6); // wrong signature for time
    s1.components.push_back({{circle_axis(8)}, {}});
    REQUIRE_THROWS_AS(build_complex(s1), BadSpec);

    ComplexSpec s2;
    s2.time = time_axis(6);
    s2.components.push_back({{time_axis(8)}, {}}); // second time axis
    REQUIRE_THROWS_AS(build_complex(s2), BadSpec);

    ComplexSpec s3;
    s3.time = time_axis(6);
    s3.components.push_back({{circle_axis(2)}, {}}); // circle too small
    REQUIRE_THROWS_AS(build_complex(s3), BadSpec);

    ComplexSpec s4;
    s4.time = time_axis(6);
    s4.components.push_back({{interval_axis(4)}, {}});
    s4.components[0].axes[0].spacing = Rat(0); // zero spacing
    REQUIRE_THROWS_AS(build_complex(s4), BadSpec);

    ComplexSpec s5; // no spatial axes: m = 1 < 2
    s5.time = time_axis(6);
    s5.components.push_back({{}, {}});
    REQUIRE_THROWS_AS(build_complex(s5), BadSpec);

    // deleting the middle column disconnects the strip
    REQUIRE_THROWS_AS(punctured_plane(2, 3, {{1, 0}, {1, 1}, {1, 2}}), BadSpec);
    // out-of-range deletion
    REQUIRE_THROWS_AS(punctured_plane(2, 3, {{3, 0}}), BadSpec);
}

TEST_CASE("d squares to zero on every support") {
    for (const ComplexPtr& c :
         {cylinder(4, 6), punctured_plane(3, 4, {{1, 1}, {1, 2}, {2, 1}, {2, 2}})}) {
        for (const auto& s : all_supports) {
            for (int k = 0; k + 1 < c->m; ++k) {
                RationalMatrix lo = coboundary_matrix(*c, k, s);
                RationalMatrix hi = coboundary_matrix(*c, k + 1, s);
                REQUIRE(mat_mul(hi, lo).is_zero());
            }
        }
    }
}

TEST_CASE("delta squares to zero and is the exact metric adjoint of d") {
    std::mt19937 rng(3);
    for (const ComplexPtr& c : {cylinder(4, 6), punctured_plane(3, 4, {{1, 1}})}) {
        for (int k = 2; k <= c->m; ++k) {
            RationalMatrix d1 = full_codifferential(*c, k);
            RationalMatrix d0 = full_codifferential(*c, k - 1);
            REQUIRE(mat_mul(d0, d1).is_zero());
        }
        for (const auto& s : all_supports) {
            for (int k = 2; k <= c->m; ++k) {
                RationalMatrix lo = codifferential_matrix(*c, k - 1, s);
                RationalMatrix hi = codifferential_matrix(*c, k, s);
                REQUIRE(mat_mul(lo, hi).is_zero());
            }
            // adjointness (delta a, b) = (a, d b) for s-supported cochains
            for (int k = 1; k <= c->m; ++k) {
                Cochain a = random_cochain(c, k, s, rng);
                Cochain b = random_cochain(c, k - 1, s, rng);
                REQUIRE(metric_pairing(delta_s(a, s), b) == metric_pairing(a, apply_d(b)));
            }
        }
    }
}

TEST_CASE("metric pairing signs and symmetry") {
    ComplexPtr c = cylinder();
    // single spatial edge at time vertex 2: spacelike, weight +1
    Cochain se = unit(c, 1, cid(c, 0, false, 2, {{true, 3}}));
    REQUIRE(metric_pairing(se, se) == rat(1));
    // single time edge x spatial vertex: timelike, weight -1
    Cochain te = unit(c, 1, cid(c, 0, true, 2, {{false, 3}}));
    REQUIRE(metric_pairing(te, te) == rat(-1));

    std::mt19937 rng(5);
    for (int k = 0; k <= c->m; ++k) {
        Cochain a = random_cochain(c, k, supp_unrestricted, rng);
        Cochain b = random_cochain(c, k, supp_unrestricted, rng);
        REQUIRE(metric_pairing(a, b) == metric_pairing(b, a));
    }

    REQUIRE_THROWS_AS(metric_pairing(se, random_cochain(c, 0, supp_c, rng)), DegreeMismatch);
    ComplexPtr other = cylinder();
    REQUIRE_THROWS_AS(metric_pairing(se, unit(other, 1, 0)), ComplexMismatch);
}

TEST_CASE("codifferential of a single spatial edge has entries +-1/h^2") {
    ComplexPtr c = cylinder(6, 8, rat(2, 3));
    Cochain se = unit(c, 1, cid(c, 0, false, 2, {{true, 3}}));
    Cochain d = apply_delta(se);
    REQUIRE(d.values.terms.size() == 2);
    // h = 2/3 so 1/h^2 = 9/4; the lower vertex gets the minus sign
    REQUIRE(sv_get(d.values, cid(c, 0, false, 2, {{false, 3}})) == rat(-9, 4));
    REQUIRE(sv_get(d.values, cid(c, 0, false, 2, {{false, 4}})) == rat(9, 4));
}

TEST_CASE("alternating cell counts match the product Euler characteristic") {
    for (const ComplexPtr& c :
         {cylinder(5, 7), punctured_plane(4, 5, {{2, 2}}),
          punctured_plane(3, 6, {{2, 2}, {2, 3}, {3, 2}, {3, 3}})}) {
        // spatial characteristics counted directly from the tables
        long chi_alive = 0, chi_interior = 0;
        for (const auto& comp : c->comps)
            for (int j = 0; j <= comp.dim(); ++j) {
                long sign = (j % 2 == 0) ? 1 : -1;
                long alive = static_cast<long>(comp.cells[static_cast<size_t>(j)].size());
                long strat = 0;
                for (bool b : comp.in_stratum[static_cast<size_t>(j)]) strat += b ? 1 : 0;
                chi_alive += sign * alive;
                chi_interior += sign * (alive - strat);
            }
        for (const auto& s : all_supports) {
            long chi = 0;
            for (int k = 0; k <= c->m; ++k) {
                long sign = (k % 2 == 0) ? 1 : -1;
                chi += sign * static_cast<long>(allowed_cells(*c, k, s).size());
            }
            long chi_space = (s.space_flag == Flag::Compact) ? chi_interior : chi_alive;
            long expected = (s.time_flag == Flag::Compact) ? -chi_space : chi_space;
            REQUIRE(chi == expected);
        }
    }
}

TEST_CASE("cup product satisfies the Leibniz rule") {
    std::mt19937 rng(17);
    for (const ComplexPtr& c : {cylinder(3, 5), punctured_plane(2, 3, {{1, 1}})}) {
        for (int ka = 0; ka < c->m; ++ka)
            for (int kb = 0; ka + kb < c->m; ++kb) {
                Cochain a = random_cochain(c, ka, supp_unrestricted, rng, 40);
                Cochain b = random_cochain(c, kb, supp_unrestricted, rng, 40);
                Cochain lhs = apply_d(cup_product(a, b));
                Cochain rhs1 = cup_product(apply_d(a), b);
                Cochain rhs2 = cup_product(a, apply_d(b));
                SparseVec rhs = sv_axpy(rhs1.values, (ka % 2 == 0) ? rat(1) : rat(-1), rhs2.values);
                REQUIRE(lhs.values == rhs);
            }
    }
}

TEST_CASE("wedge pairing: normalization, Stokes, and the cylinder pairing") {
    ComplexPtr c = cylinder();
    std::mt19937 rng(29);

    // top-degree bump with coefficient sum 1 against the constant 0-cochain
    Cochain bump = unit(c, 2, cid(c, 0, true, 3, {{true, 2}}));
    SparseVec ones;
    for (int gid = 0; gid < c->n_cells[0]; ++gid) ones.terms.push_back({gid, rat(1)});
    Cochain nu = make_cochain(c, 0, ones);
    REQUIRE(wedge_pairing(bump, nu) == rat(1));
    REQUIRE(wedge_pairing(nu, bump) == rat(1));

    // Stokes: <d rho, beta> = 0 for closed beta when rho is compact
    for (int trial = 0; trial < 10; ++trial) {
        Cochain rho = random_cochain(c, 0, supp_c, rng);
        Cochain gamma = random_cochain(c, 0, supp_unrestricted, rng);
        REQUIRE(wedge_pairing(apply_d(rho), apply_d(gamma)) == rat(0));
        // the winding cocycle: every spatial edge at every time carries 1
        SparseVec wv;
        for (int t = 0; t <= c->T(); ++t)
            for (int i = 0; i < 8; ++i) wv.terms.push_back({cid(c, 0, false, t, {{true, i}}), rat(1)});
        std::sort(wv.terms.begin(), wv.terms.end());
        Cochain winding = make_cochain(c, 1, wv);
        REQUIRE(apply_d(winding).values.is_zero());
        Cochain rho0 = random_cochain(c, 0, supp_c, rng);
        REQUIRE(wedge_pairing(apply_d(rho0), winding) == rat(0));
    }

    // the pinned cylinder pairing: unit time-compact 2-cochain vs constant 1
    REQUIRE(wedge_pairing(bump, nu) == rat(1));

    REQUIRE_THROWS_AS(wedge_pairing(nu, nu), DegreeMismatch);
}

TEST_CASE("metric Gram between compact and free bases has full row rank") {
    ComplexPtr c = punctured_plane(3, 4, {{1, 1}});
    for (int k = 0; k <= c->m; ++k) {
        auto cc = allowed_cells(*c, k, supp_c);
        // diagonal metric: the Gram row for each compact cell hits the same
        // free cell with a nonzero weight
        const auto& g = c->metric[static_cast<size_t>(k)];
        RationalMatrix gram(static_cast<int>(cc.size()), c->n_cells[static_cast<size_t>(k)]);
        for (size_t i = 0; i < cc.size(); ++i)
            gram.set(static_cast<int>(i), cc[i], g[static_cast<size_t>(cc[i])]);
        REQUIRE(rank_of(gram) == static_cast<int>(cc.size()));
    }
}

TEST_CASE("support systems are validated cell by cell") {
    ComplexPtr c = cylinder();
    Cochain w = unit(c, 0, cid(c, 0, false, 0, {{false, 2}})); // on the time boundary
    REQUIRE(satisfies(w, supp_sc));
    REQUIRE_FALSE(satisfies(w, supp_tc));
    REQUIRE_THROWS_AS(require_support(w, supp_c, "test"), ValidationError);
    try {
        require_support(w, supp_tc, "test");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(std::string(e.what()).find("t:v0") != std::string::npos);
    }
}

TEST_CASE("pushforward and pullback along a time subwindow") {
    ComplexPtr big = cylinder(6, 8);
    ComplexPtr small = cylinder(4, 8);
    Embedding e = make_embedding(small, big, {{0, 1, {0}}});
    std::mt19937 rng(31);

    for (int k = 0; k <= small->m; ++k) {
        Cochain w = random_cochain(small, k, supp_tc, rng);
        Cochain pushed = pushforward(e, w, supp_tc);
        // extension by zero preserves coefficients on the image
        REQUIRE(pullback(e, pushed).values == w.values);
        if (k < small->m) {
            Cochain lhs = pushforward(e, apply_d(w), supp_tc);
            REQUIRE(lhs.values == apply_d(pushed).values);
        }
    }

    // unrestricted cochains must be refused: the time frontier is interior
    Cochain bad = unit(small, 0, cid(small, 0, false, 0, {{false, 0}}));
    REQUIRE_THROWS_AS(pushforward(e, bad, supp_unrestricted), ValidationError);
}

TEST_CASE("pushforward refuses a collar violation by naming the cell") {
    ComplexPtr big = cylinder(8, 8);
    ComplexPtr small = cylinder(4, 8);
    Embedding e2 = make_embedding(small, big, {{0, 2, {0}}}, 2);
    // time-compact, but the first time-edge band lies inside the width-2 collar
    Cochain w = unit(small, 1, cid(small, 0, true, 0, {{false, 3}}));
    REQUIRE(satisfies(w, supp_tc));
    try {
        pushforward(e2, w, supp_tc);
        FAIL("expected SupportLeak");
    } catch (const SupportLeak& ex) {
        REQUIRE(std::string(ex.what()).find("t:e0") != std::string::npos);
    }

    // the second vertex slice only joins the collar at width three
    Cochain v1 = unit(small, 0, cid(small, 0, false, 1, {{false, 3}}));
    REQUIRE_NOTHROW(pushforward(e2, v1, supp_tc));
    Embedding e3 = make_embedding(small, big, {{0, 2, {0}}}, 3);
    REQUIRE_THROWS_AS(pushforward(e3, v1, supp_tc), SupportLeak);
}

TEST_CASE("annulus ring pushes into the full plane with its sum intact") {
    ComplexPtr ann = punctured_plane(2, 3, {{1, 1}});
    ComplexPtr plane = punctured_plane(2, 3, {});
    Embedding e = make_embedding(ann, plane, {{0, 0, {0, 0}}});

    // ring of spatial squares at time vertex 1 (the hole's eight neighbors)
    SparseVec ring;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            if (x == 1 && y == 1) continue;
            ring.terms.push_back({cid(ann, 0, false, 1, {{true, x}, {true, y}}), rat(1)});
        }
    std::sort(ring.terms.begin(), ring.terms.end());
    Cochain w = make_cochain(ann, 2, ring);
    REQUIRE(satisfies(w, supp_sc));

    Cochain pushed = pushforward(e, w, supp_sc);
    Rat sum(0);
    for (const auto& [gid, v] : pushed.values.terms) {
        (void)gid;
        sum += v;
    }
    REQUIRE(sum == rat(8));
    REQUIRE(pullback(e, pushed).values == w.values);

    // constant 0-cochain pulls back to the constant
    SparseVec ones;
    for (int gid = 0; gid < plane->n_cells[0]; ++gid) ones.terms.push_back({gid, rat(1)});
    Cochain back = pullback(e, make_cochain(plane, 0, ones));
    REQUIRE(static_cast<int>(back.values.terms.size()) == ann->n_cells[0]);
    for (const auto& [gid, v] : back.values.terms) {
        (void)gid;
        REQUIRE(v == rat(1));
    }

    // pullback of a closed cochain is closed
    std::mt19937 rng(37);
    Cochain gamma = random_cochain(plane, 0, supp_unrestricted, rng);
    REQUIRE(apply_d(pullback(e, apply_d(gamma))).values.is_zero());
}

TEST_CASE("embedding validation refuses bad maps") {
    ComplexPtr big = cylinder(6, 8);
    ComplexPtr small = cylinder(4, 8);
    // time window out of range
    REQUIRE_THROWS_AS(make_embedding(small, big, {{0, 3, {0}}}), ValidationError);
    // circle size mismatch
    ComplexPtr thin = cylinder(4, 6);
    REQUIRE_THROWS_AS(make_embedding(thin, big, {{0, 1, {0}}}), ValidationError);
    // collar margin must be at least one
    REQUIRE_THROWS_AS(make_embedding(small, big, {{0, 1, {0}}}, 0), ValidationError);

    // image overlapping a deleted region
    ComplexPtr strip = punctured_plane(2, 2, {});
    ComplexPtr holed = punctured_plane(2, 6, {{2, 2}, {2, 3}, {3, 2}, {3, 3}});
    REQUIRE_THROWS_AS(make_embedding(strip, holed, {{0, 2, {2, 2}}}), ValidationError);
    // same strip fits in the corner
    REQUIRE_NOTHROW(make_embedding(strip, holed, {{0, 0, {0, 0}}}));

    // two components landing on the same cells
    ComplexSpec two;
    two.time = time_axis(2);
    two.components.push_back({{interval_axis(2)}, {}});
    two.components.push_back({{interval_axis(2)}, {}});
    ComplexPtr pair = build_complex(two);
    ComplexSpec one;
    one.time = time_axis(2);
    one.components.push_back({{interval_axis(8)}, {}});
    ComplexPtr line = build_complex(one);
    REQUIRE_THROWS_AS(make_embedding(pair, line, {{0, 0, {1}}, {0, 0, {1}}}), ValidationError);
    REQUIRE_NOTHROW(make_embedding(pair, line, {{0, 0, {1}}, {0, 0, {5}}}));
}

TEST_CASE("interval axes embed into strictly larger circles") {
    ComplexSpec strip_spec;
    strip_spec.time = time_axis(4);
    strip_spec.components.push_back({{interval_axis(4)}, {}});
    ComplexPtr strip = build_complex(strip_spec);
    ComplexPtr cyl = cylinder(4, 8);

    Embedding e = make_embedding(strip, cyl, {{0, 0, {6}}}); // wraps across 0
    std::mt19937 rng(41);
    Cochain w = random_cochain(strip, 1, supp_sc, rng);
    Cochain pushed = pushforward(e, w, supp_sc);
    REQUIRE(pullback(e, pushed).values == w.values);

    // a full-size interval cannot embed in an equal circle
    ComplexSpec full_spec;
    full_spec.time = time_axis(4);
    full_spec.components.push_back({{interval_axis(8)}, {}});
    ComplexPtr full = build_complex(full_spec);
    REQUIRE_THROWS_AS(make_embedding(full, cyl, {{0, 0, {0}}}), ValidationError);
}
