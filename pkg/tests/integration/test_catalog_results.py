"""
Integration tests: stability results on the catalog polygons
"""

import math
from collections import Counter

import numpy as np
import pytest

from pinball.catalog import (
    catalog_names,
    fagnano_itinerary,
    format_outcomes,
    known_polygon,
    regular_polygon,
    reproduce,
    tri306090,
)
from pinball.cylinder import affine_return_map, build_cylinder
from pinball.dynamics import (
    PhasePoint,
    find_attracting_cycles,
    inverse_pinball_step,
    phase_distance,
    pinball_step,
    solve_periodic_point,
)
from pinball.exceptions import PinballError
from pinball.itinerary import Itinerary, enumerate_words
from pinball.stability import (
    Verdict,
    classify,
    continue_orbit,
    gsv_check,
    parse_lambda_grid,
    rational_multiple_of_pi,
    rectangle,
    rectangle_admissible_slopes,
    rectangle_cylinder_itinerary,
    slope_derivative,
)

SQRT3 = math.sqrt(3)


def _stable_even_cylinders():
    for name in catalog_names():
        polygon, cases = known_polygon(name)
        for case in cases:
            if case.expected is Verdict.LAMBDA_STABLE:
                yield name, polygon, case.itinerary


@pytest.mark.integration
@pytest.mark.timeout(120)
class TestReproduction:
    """Test every catalog case against classify"""

    def test_all_cases_pass(self):
        """Test verdicts and witnesses for the default polygon list"""
        outcomes = reproduce(max_workers=2)
        assert len(outcomes) > 40
        assert all(o.passed for o in outcomes), format_outcomes(outcomes)

    def test_right_triangle_cylinders(self, right_triangle_30):
        """Test the 30-60-90 cylinders and their rational departure angles"""
        _, cases = known_polygon("tri306090")
        departures = set()
        for case in cases:
            report = classify(right_triangle_30, case.itinerary)
            assert report.verdict is Verdict.LAMBDA_STABLE
            departures.add(rational_multiple_of_pi(abs(report.departure_angle)))
        assert len(cases) == 5
        assert {str(f) for f in departures} == {"0", "1/6", "1/3"}

    def test_right_triangle_endpoint_sums(self, right_triangle_30):
        """Test Omega_0 L lies between the endpoint sums of the period-10 cylinder"""
        report = classify(right_triangle_30, Itinerary((1, 2, 3, 2, 3, 2, 1, 3, 2, 3)))
        assert report.sum_left == pytest.approx(0.0, abs=1e-9)
        assert report.omega0_L == pytest.approx(6 * math.pi / 5, abs=1e-9)
        assert report.sum_right == pytest.approx(1.5 * math.pi, abs=1e-9)


@pytest.mark.integration
@pytest.mark.timeout(120)
class TestSquareClassification:
    """Test the complete list of lambda-stable orbits of the square"""

    def test_only_ping_pong_and_fagnano(self, square):
        """Test all words up to period 8"""
        stable = set()
        for period in range(2, 9):
            for word in enumerate_words(4, period):
                report = classify(square, word)
                if report.is_lambda_stable:
                    stable.add(report.itinerary.canonical().word)
        assert stable == {(1, 3), (2, 4), (1, 2, 3, 4), (1, 4, 3, 2)}

    def test_no_odd_orbits(self, square):
        """Test odd words are never realized"""
        for word in enumerate_words(4, 5):
            assert classify(square, word).verdict is Verdict.NO_SUCH_ORBIT


@pytest.mark.integration
@pytest.mark.timeout(60)
class TestRectangleSlopes:
    """Test the aspect ratio equation of rectangles"""

    def test_square_admits_diagonal_only(self):
        """Test p + q <= 50 on the square"""
        slopes = rectangle_admissible_slopes(1.0, 50)
        assert [(s.p, s.q) for s in slopes] == [(0, 1), (1, 1)]

    def test_admitted_pairs_are_stable(self):
        """Test admitted slopes classify as lambda-stable"""
        for w in (1.0, 0.5 / math.tan(math.pi / 6)):
            slopes = rectangle_admissible_slopes(w, 50)
            assert len(slopes) == 2
            for slope in slopes[1:]:
                word = rectangle_cylinder_itinerary(w, slope.p, slope.q)
                assert classify(rectangle(w), word).verdict is Verdict.LAMBDA_STABLE

    def test_rejected_pairs_are_not_stable(self):
        """Test the other low slopes of the square"""
        square = rectangle(1.0)
        for p, q in ((1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)):
            word = rectangle_cylinder_itinerary(1.0, p, q)
            assert word.period == 2 * (p + q)
            assert not classify(square, word).is_lambda_stable, (p, q)


@pytest.mark.integration
@pytest.mark.timeout(60)
class TestRegularPolygons:
    """Test the Fagnano cylinders of regular polygons"""

    @pytest.mark.parametrize("d", range(3, 9))
    def test_fagnano_stable(self, d):
        """Test every Fagnano word with 2m < d"""
        polygon = regular_polygon(d)
        for m in range(1, (d + 1) // 2):
            word = fagnano_itinerary(d, m)
            report = classify(polygon, word)
            expected = Verdict.LAMBDA_STABLE if word.is_even else Verdict.ODD_PERIOD
            assert report.verdict is expected, (d, m)

    @pytest.mark.parametrize("d", [4, 6, 8])
    def test_midpoint_and_ladder(self, d):
        """Test the midpoint identity and the length ladder"""
        polygon = regular_polygon(d)
        for m in range(1, (d + 1) // 2):
            word = fagnano_itinerary(d, m)
            if not word.is_even:
                continue
            cylinder = build_cylinder(polygon, word)
            assert cylinder.alternating_moment(cylinder.midpoint) == \
                pytest.approx(cylinder.omega0 * cylinder.total_length, abs=1e-9)
            steps = cylinder.lengths_l[1::2] - cylinder.lengths_l[0::2]
            np.testing.assert_allclose(steps, cylinder.lengths_r[0], atol=1e-9)


@pytest.mark.integration
@pytest.mark.timeout(60)
class TestConjugacy:
    """Test the inverse map built from the reversal conjugacy"""

    @pytest.mark.parametrize("name", catalog_names())
    def test_inverse_on_random_points(self, name):
        """Test step then inverse returns the point"""
        polygon, _ = known_polygon(name)
        rng = np.random.default_rng(20240611)
        for lam in (0.8, 0.9, 1.1, 1.25):
            checked = 0
            for _ in range(100):
                side = int(rng.integers(1, polygon.d + 1))
                length = polygon.side_length(side)
                p = PhasePoint.at(side, float(rng.uniform(0.05, 0.95)) * length,
                                  float(rng.uniform(-1.2, 1.2)))
                try:
                    back = inverse_pinball_step(polygon, pinball_step(polygon, p, lam), lam)
                except PinballError:
                    continue
                assert phase_distance(polygon, back, p) < 1e-9
                checked += 1
            assert checked >= 50, (name, lam)


@pytest.mark.integration
@pytest.mark.timeout(60)
class TestSlopeDerivative:
    """Test dF/d lambda against finite differences"""

    def test_catalog_cylinders(self):
        """Test at both ends and the middle of every stable cylinder"""
        h = 1e-5
        for name, polygon, word in _stable_even_cylinders():
            cylinder = build_cylinder(polygon, word)
            upper = affine_return_map(polygon, word, 1.0 + h)
            lower = affine_return_map(polygon, word, 1.0 - h)
            interval = cylinder.base_interval
            for s in (interval.left, interval.midpoint, interval.right):
                numeric = (upper(s) - lower(s)) / (2 * h)
                assert slope_derivative(polygon, word, s) == pytest.approx(numeric, abs=1e-6), \
                    (name, str(word), s)


@pytest.mark.integration
@pytest.mark.timeout(120)
class TestContinuation:
    """Test pinball periodic points near lambda = 1"""

    def test_stable_cylinders_continue(self):
        """Test legal fixed points with bounded drift on the full lambda grid"""
        grid = parse_lambda_grid("0.9:1.1:41")
        for name, polygon, word in _stable_even_cylinders():
            rows = continue_orbit(polygon, word, grid)
            assert len(rows) == 41
            assert all(row.legal for row in rows), (name, str(word))
            assert max(row.residual for row in rows) < 1e-10
            centre = min(rows, key=lambda row: abs(row.lam - 1.0))
            drift = max(abs(row.s0 - centre.s0) / abs(row.lam - 1.0)
                        for row in rows if row is not centre)
            assert drift < 100.0, (name, str(word), drift)

    def test_equilateral_full_grid(self, triangle):
        """Test all 41 rows for the perpendicular cylinder"""
        rows = continue_orbit(triangle, Itinerary((1, 2, 1, 3)), parse_lambda_grid("0.9:1.1:41"))
        assert len(rows) == 41
        assert all(row.legal for row in rows)
        assert rows[20].s0 == pytest.approx(0.5, abs=1e-9)
        assert rows[0].s0 > 0.5 > rows[-1].s0


@pytest.fixture(scope="module")
def right_triangle_cycles():
    """Seeded search on the 30-60-90 triangle at lambda = 0.95"""
    polygon = tri306090()
    cycles = find_attracting_cycles(polygon, 0.95, n_samples=64, transient=2000, max_period=10,
                                    seed=0, max_workers=2)
    return polygon, cycles


def _position_slope(polygon, start, lam, period):
    """Derivative in s of the period-step return map at fixed angle"""
    h = 1e-6 * polygon.side_length(start.side)

    def returned(s):
        p = PhasePoint.at(start.side, s, start.theta)
        for _ in range(period):
            p = pinball_step(polygon, p, lam)
        return p.s

    return (returned(start.s + h) - returned(start.s - h)) / (2 * h)


@pytest.mark.integration
@pytest.mark.slow
@pytest.mark.timeout(300)
class TestCycleSearch:
    """Test the random search for periodic cycles"""

    def test_equilateral_period_four(self, triangle):
        """Test the search at lambda = 0.9 lands on the perpendicular family"""
        cycles = find_attracting_cycles(triangle, 0.9, n_samples=64, transient=200, max_period=4,
                                        seed=0, record_steps=2000, max_workers=2)
        words = {it.word for it, _ in cycles}
        assert words & {(1, 2, 1, 3), (1, 2, 3, 2), (1, 3, 2, 3)}
        for itinerary, segment in cycles:
            assert segment.itinerary == itinerary.word

    def test_right_triangle_period_six(self, right_triangle_cycles):
        """Test the 30-60-90 search at lambda = 0.95 finds {1,3,2,3,2,3}"""
        _, cycles = right_triangle_cycles
        assert (1, 3, 2, 3, 2, 3) in {it.word for it, _ in cycles}

    def test_cycles_per_period_bounded(self, right_triangle_cycles):
        """Test no period p has more than d**p cycles"""
        polygon, cycles = right_triangle_cycles
        counts = Counter(it.period for it, _ in cycles)
        assert all(2 <= p <= 10 for p in counts)
        for p, count in counts.items():
            assert count <= polygon.d ** p

    def test_one_cycle_per_word(self, right_triangle_cycles):
        """Test each canonical word appears once, at its unique periodic point"""
        polygon, cycles = right_triangle_cycles
        words = [it.word for it, _ in cycles]
        assert len(words) == len(set(words))
        for itinerary, segment in cycles:
            assert itinerary.canonical() == itinerary
            if itinerary.period > 2:
                point = solve_periodic_point(polygon, itinerary, 0.95)
                assert phase_distance(polygon, point, segment.points[0]) < 1e-8, str(itinerary)

    def test_cycles_hyperbolic(self, right_triangle_cycles):
        """Test cycles of period above two have return slope away from one"""
        polygon, cycles = right_triangle_cycles
        checked = 0
        for itinerary, segment in cycles:
            if itinerary.period <= 2:
                continue
            slope = _position_slope(polygon, segment.points[0], 0.95, itinerary.period)
            assert abs(slope - 1.0) > 1e-6, (str(itinerary), slope)
            checked += 1
        assert checked > 0


@pytest.mark.integration
@pytest.mark.timeout(30)
class TestDeformationStability:
    """Test the letter-sum criterion alongside lambda-stability"""

    def test_stable_but_not_deformation_stable(self, triangle, square):
        """Test words that are lambda-stable with a nonzero letter sum"""
        assert not gsv_check(Itinerary((1, 2, 1, 3)))
        assert classify(triangle, Itinerary((1, 2, 1, 3))).verdict is Verdict.LAMBDA_STABLE
        assert not gsv_check(Itinerary((1, 2, 3, 4)))
        assert classify(square, Itinerary((1, 2, 3, 4))).verdict is Verdict.LAMBDA_STABLE

    def test_odd_words(self):
        """Test odd words are always deformation-stable"""
        for word in ((1, 2, 3), (1, 3, 5, 2, 4), (1, 2, 1, 2, 3)):
            assert gsv_check(Itinerary(word))

    def test_report_flag(self, square):
        """Test the report carries the letter-sum verdict"""
        assert gsv_check(Itinerary((1, 3, 2, 4, 3, 1, 4, 2)))
        assert not classify(square, Itinerary((1, 3))).gsv_stable
