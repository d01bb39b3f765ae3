"""
Unit tests for the catalog of known polygons and cases
"""

import csv
import json
import math
import os

import numpy as np
import pytest

from pinball.catalog import (
    DERIVED,
    KnownCase,
    catalog_names,
    check_case,
    export_cases_csv,
    fagnano_itinerary,
    format_outcomes,
    known_polygon,
    parse_catalog_name,
    regular_polygon,
    reproduce,
)
from pinball.exceptions import BadParameterError, UnknownNameError
from pinball.itinerary import Itinerary
from pinball.stability import Verdict


class TestNames:
    """Test catalog name parsing"""

    @pytest.mark.parametrize("text,expected", [
        ("equilateral", ("equilateral", {})),
        ("regular(5)", ("regular", {"d": 5})),
        (" rectangle( 2 ) ", ("rectangle", {"w": 2.0})),
        ("square", ("square", {})),
    ])
    def test_parse(self, text, expected):
        """Test names with and without parameters"""
        assert parse_catalog_name(text) == expected

    @pytest.mark.parametrize("text", ["pentagram", "Square", "regular(5"])
    def test_unknown(self, text):
        """Test names outside the catalog"""
        with pytest.raises(UnknownNameError):
            parse_catalog_name(text)

    @pytest.mark.parametrize("text", ["regular", "regular(x)", "rectangle", "square(2)"])
    def test_bad_parameter(self, text):
        """Test missing, malformed and unexpected parameters"""
        with pytest.raises(BadParameterError):
            parse_catalog_name(text)

    def test_all_names_resolve(self):
        """Test every default name builds a polygon with cases"""
        for name in catalog_names():
            polygon, cases = known_polygon(name)
            assert polygon.d >= 3
            assert cases
            for case in cases:
                case.itinerary.check_sides(polygon.d)


class TestBuilders:
    """Test polygon and word builders"""

    def test_regular_polygon(self):
        """Test unit sides and the first side on the x-axis"""
        polygon = regular_polygon(6)
        np.testing.assert_allclose(polygon.side_lengths, 1.0, atol=1e-12)
        np.testing.assert_allclose(polygon.vertices[:2], [[0.0, 0.0], [1.0, 0.0]], atol=1e-15)
        assert polygon.beta_of(1, 2) == pytest.approx(2 * math.pi / 3)
        assert polygon.name == "regular(6)"

    def test_regular_polygon_too_small(self):
        """Test d below three"""
        with pytest.raises(BadParameterError):
            regular_polygon(2)
        with pytest.raises(BadParameterError):
            known_polygon("regular(2)")

    def test_fagnano_words(self):
        """Test i_{k+1} = i_k + m"""
        assert fagnano_itinerary(4, 1).word == (1, 2, 3, 4)
        assert fagnano_itinerary(6, 2).word == (1, 3, 5)
        assert fagnano_itinerary(6, 2, start=2).word == (2, 4, 6)
        assert fagnano_itinerary(8, 3).word == (1, 4, 7, 2, 5, 8, 3, 6)
        assert fagnano_itinerary(6, 3).word == (1, 4)
        with pytest.raises(BadParameterError):
            fagnano_itinerary(6, 4)

    def test_rectangle_parameter(self):
        """Test the rectangle takes its aspect ratio from the name"""
        polygon, _ = known_polygon("rectangle(2)")
        np.testing.assert_allclose(polygon.vertices[2], [2.0, 1.0])


class TestCases:
    """Test the known case lists"""

    def test_equilateral_cases(self):
        """Test the equilateral list carries both directions"""
        _, cases = known_polygon("equilateral")
        words = {case.itinerary.word: case.expected for case in cases}
        assert words[(1, 2, 3)] is Verdict.ODD_PERIOD
        assert words[(1, 3, 2)] is Verdict.ODD_PERIOD
        assert words[(1, 2, 1, 3)] is Verdict.LAMBDA_STABLE
        assert words[(1, 3, 1, 2)] is Verdict.LAMBDA_STABLE

    def test_no_duplicate_words(self):
        """Test reversal does not duplicate palindromic words"""
        for name in ("tri306090", "tri454590", "hexagon"):
            _, cases = known_polygon(name)
            words = [case.itinerary.word for case in cases]
            assert len(words) == len(set(words))

    def test_square_cases(self):
        """Test the square keeps the diagonal cylinder and rejects slope 1/2"""
        _, cases = known_polygon("square")
        words = {case.itinerary.word: case.expected for case in cases}
        assert words[(1, 3)] is Verdict.PING_PONG
        assert words[(1, 2, 3, 4)] is Verdict.LAMBDA_STABLE
        assert words[(1, 2, 4, 3, 2, 4)] is Verdict.NO_SUCH_ORBIT

    def test_regular_octagon(self):
        """Test verdicts by Fagnano step in the octagon"""
        _, cases = known_polygon("regular(8)")
        verdicts = {case.itinerary.word: case.expected for case in cases}
        assert verdicts[(1, 2, 3, 4, 5, 6, 7, 8)] is Verdict.LAMBDA_STABLE
        assert verdicts[(1, 3, 5, 7)] is Verdict.LAMBDA_STABLE
        assert verdicts[(1, 5)] is Verdict.PING_PONG

    def test_check_case_reports_mismatch(self, triangle):
        """Test a wrong expectation is reported"""
        case = KnownCase("equilateral", Itinerary((1, 2, 1, 3)), Verdict.NOT_LAMBDA_STABLE)
        outcome = check_case(triangle, case)
        assert not outcome.passed
        assert "verdict" in outcome.mismatches[0]

    def test_check_case_witness_mismatch(self, triangle):
        """Test a wrong witness is reported"""
        case = KnownCase("equilateral", Itinerary((1, 2, 1, 3)), Verdict.LAMBDA_STABLE,
                         {"omega0": 1.0})
        outcome = check_case(triangle, case)
        assert not outcome.passed
        assert outcome.mismatches[0].startswith("omega0")


class TestReproduce:
    """Test reproduction and export"""

    def test_equilateral_reproduces(self):
        """Test every equilateral case passes"""
        outcomes = reproduce(["equilateral"], max_workers=2)
        assert outcomes
        assert all(o.passed for o in outcomes), format_outcomes(outcomes)

    def test_format_outcomes(self):
        """Test the summary line"""
        outcomes = reproduce(["tri454590"], max_workers=1)
        text = format_outcomes(outcomes)
        assert text.endswith(f"{len(outcomes)}/{len(outcomes)} cases passed\n")
        assert "provenance" in text.splitlines()[0]

    def test_export_cases_csv(self, temp_dir):
        """Test the CSV case list"""
        _, cases = known_polygon("tri454590")
        path = os.path.join(temp_dir, "out", "cases.csv")
        export_cases_csv(cases, path)
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == len(cases)
        assert rows[0]["itinerary"] == "1,2,3,2"
        assert rows[-1]["provenance"] == DERIVED
        assert rows[-1]["note"] == "reverse of 1,2,1,3,2,3"
        witnesses = json.loads(rows[0]["witnesses"])
        assert float(witnesses["total_length"]) == pytest.approx(2.0)
