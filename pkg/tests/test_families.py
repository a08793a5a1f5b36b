"""Family builders: weights, measures, witnesses and counterexample behavior."""

import pytest

from graphlab.errors import FamilyError
from graphlab.families import (
    FamilySpec,
    add_killing,
    make,
    parse_family_spec,
    witness_functions,
)
from graphlab.metrics import path_metric, verify_intrinsic
from graphlab.resistance import resistance_finite

from conftest import assert_close


class TestWeights:
    def test_comb_paper_weights(self):
        g = make(FamilySpec("comb")).build_ball(4).graph
        assert g.b("1:1", "1:2") == 4.0  # tooth depth k: weight 2^k
        assert g.b("2:0", "3:0") == 8.0  # spine level n: weight 2^n
        assert g.b("0:0", "0:1") == 2.0

    def test_triangle_ladder_paper_weights(self):
        g = make(FamilySpec("triangle_ladder")).build_ball(5).graph
        assert g.b("3", "4") == 1.5  # half of the detour weight
        assert g.b("3", "3:2") == 3.0
        assert g.b("3:2", "4") == 3.0
        assert len([v for v in g.vertices if v.startswith("3:")]) == 3

    def test_twin_rays_weights(self):
        g = make(FamilySpec("twin_rays")).build_ball(4).graph
        assert g.b("2:0", "3:0") == 4.0  # rail weight 2^n between levels n,n+1
        assert g.b("2:1", "3:1") == 4.0
        assert g.b("2:0", "2:3") == 1.0
        assert g.b("2:1", "2:3") == 1.0

    def test_ray_power_weights(self):
        g = make(FamilySpec("ray_power", (3.0,))).build_ball(5).graph
        assert g.b("2", "3") == 8.0

    def test_unknown_family(self):
        with pytest.raises(FamilyError):
            make(FamilySpec("moebius"))


class TestMeasures:
    def test_canonical_rule(self):
        fam = make(FamilySpec("ray_power", (3.0,), "canonical"))
        ball = fam.build_ball(6)
        m = ball.measure
        # interior vertex k: half the sum of the two inverse weights
        assert_close(m["3"], 0.5 * (1 / 8 + 1 / 27), tol=1e-15)
        assert_close(m["1"], 0.5 * 1.0, tol=1e-15)
        check = verify_intrinsic(ball.graph, m, path_metric(ball.graph))
        assert check.ok and check.worst_ratio <= 1.0 + 1e-12

    def test_geometric_rule_total(self):
        fam = make(FamilySpec("ray_power", (3.0,), "geometric", 0.5))
        m = fam.build_ball(20).measure
        assert m.total < 2.0
        assert_close(m["3"], 0.25, tol=1e-15)

    def test_unit_rule(self):
        fam = make(FamilySpec("comb"))
        m = fam.build_ball(3).measure
        assert all(m[v] == 1.0 for v in m.values)

    def test_star_augmented_rejects_canonical(self):
        spec = FamilySpec(
            "star_augmented", (FamilySpec("ray_power", (3.0,), "canonical"),), "canonical"
        )
        with pytest.raises(FamilyError):
            make(spec).build_ball(4)


class TestWitnesses:
    def test_cubic_ray_energy_dichotomy(self):
        fam = make(FamilySpec("ray_power", (3.0,)))
        wits = witness_functions(fam)
        div = [wits["inverse"](n)[1] for n in (8, 16, 32, 64)]
        assert all(b > a for a, b in zip(div, div[1:]))
        # truncated energies of 1/k grow like the harmonic series
        assert div[-1] - div[-2] == pytest.approx(
            sum(j / (j + 1) ** 2 for j in range(33, 65)), rel=1e-9
        )
        conv = [wits["inverse_power_1"](n)[1] for n in (8, 16, 32, 64)]
        assert conv[-1] - conv[-2] < 2e-3  # Cauchy tail

    def test_constant_has_zero_energy(self):
        fam = make(FamilySpec("ray_power", (3.0,)))
        assert witness_functions(fam)["constant"](12)[1] == 0.0

    def test_unbounded_witness_on_flat_ray(self):
        fam = make(FamilySpec("ray_power", (0.0,)))
        wits = witness_functions(fam)
        f, e = wits["unbounded_finite_energy"](400)
        assert abs(complex(f["400"])) > 4.0
        f2, e2 = wits["unbounded_finite_energy"](800)
        assert e2 - e < 0.01  # energy tail nearly exhausted

    def test_unsupported_family(self):
        with pytest.raises(FamilyError):
            witness_functions(make(FamilySpec("comb")))


class TestCounterexampleBehavior:
    def test_comb_ball_diameter_below_three(self):
        fam = make(FamilySpec("comb"))
        g = fam.build_ball(10).graph
        d = path_metric(g)
        assert d.finite_max() <= 3.0

    def test_comb_tooth_tips_separate(self):
        fam = make(FamilySpec("comb"))
        g = fam.build_ball(10).graph
        d = path_metric(g)
        tips = [f"{n}:3" for n in range(6)]
        for i, a in enumerate(tips):
            for b in tips[i + 1:]:
                assert d.distance(a, b) >= 1.5

    def test_triangle_ladder_tension(self):
        fam = make(FamilySpec("triangle_ladder"))
        g = fam.build_ball(40).graph
        d = path_metric(g, source="1")
        assert d.distance("1", "41") == pytest.approx(
            2 * sum(1 / j for j in range(1, 41)), rel=1e-12
        )
        r_sum = sum(2.0 / (n * (n + 1)) for n in range(1, 41))
        assert r_sum <= 2.0

    def test_twin_rays_rho_vanishes_d_stays(self):
        fam = make(FamilySpec("twin_rays"))
        values = []
        for n in (2, 4, 6, 8):
            g = fam.build_ball(n + 2).graph
            values.append(resistance_finite(g, f"{n}:0", f"{n}:1").r)
            d = path_metric(g, source=f"{n}:0")
            assert_close(d.distance(f"{n}:0", f"{n}:1"), 1.0, tol=1e-12)
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 0.2

    def test_star_augmented_hub_degree_grows(self):
        fam = make(FamilySpec("star_augmented", (FamilySpec("ray_power", (3.0,)),)))
        deg = [len(fam.build_ball(n).graph.adjacency["1"]) for n in (4, 8, 12)]
        assert deg == [4, 8, 12]  # one ray neighbor plus the attached hub edges


class TestParsing:
    def test_ray_spec(self):
        spec = parse_family_spec("ray_power:3")
        assert spec.name == "ray_power" and spec.params == (3.0,)

    def test_random_tree_spec(self):
        spec = parse_family_spec("random_tree:7:48")
        assert spec.params == (7, 48)

    def test_nested_star(self):
        spec = parse_family_spec("star_augmented:ray_power:2")
        assert spec.params[0].name == "ray_power"

    def test_random_tree_determinism(self):
        a = make(FamilySpec("random_tree", (9, 30))).build_ball(30).graph
        b = make(FamilySpec("random_tree", (9, 30))).build_ball(30).graph
        assert dict(a.edges) == dict(b.edges)


def test_add_killing_wraps_balls():
    fam = add_killing(
        make(FamilySpec("ray_power", (3.0,))), lambda v: 2.0 ** (-int(v))
    )
    g = fam.build_ball(4).graph
    assert g.killing["2"] == 0.25
    assert fam.facts is None
