"""
Unit tests for cyclic itinerary words
"""

import pytest

from pinball.exceptions import IllegalItineraryError
from pinball.itinerary import Itinerary, Parity, as_itinerary, enumerate_words


class TestItinerary:
    """Test word validation and cyclic operations"""

    def test_parse_and_format(self):
        """Test the comma-separated text form"""
        it = Itinerary.parse("{1, 2, 1, 3}")
        assert it.word == (1, 2, 1, 3)
        assert str(it) == "1,2,1,3"
        assert as_itinerary("1,2,1,3") == it
        assert as_itinerary([1, 2, 1, 3]) == it

    @pytest.mark.parametrize("word", [(1,), (1, 1, 2), (1, 2, 1), (0, 1), ()])
    def test_invalid_words(self, word):
        """Test short words, repeated letters (cyclically) and zero"""
        with pytest.raises(IllegalItineraryError):
            Itinerary(word)

    def test_unparseable(self):
        """Test text that is not a word"""
        with pytest.raises(IllegalItineraryError):
            Itinerary.parse("1,x,3")

    def test_cyclic_indexing(self):
        """Test indices wrap around"""
        it = Itinerary((1, 2, 1, 3))
        assert it[4] == 1
        assert it[-1] == 3
        assert it.transitions == [(1, 2), (2, 1), (1, 3), (3, 1)]

    def test_parity(self):
        """Test period, parity and half period"""
        even = Itinerary((1, 2, 3, 2))
        odd = Itinerary((1, 2, 3))
        assert even.parity is Parity.EVEN and even.is_even
        assert even.half_period == 2
        assert odd.parity is Parity.ODD and not odd.is_even

    def test_canonical(self):
        """Test the minimal rotation and its offset"""
        it = Itinerary((3, 1, 2, 1))
        assert it.canonical().word == (1, 2, 1, 3)
        assert it.rotated(it.canonical_offset()) == it.canonical()
        assert Itinerary((2, 3, 2, 1)).canonical().word == (1, 2, 3, 2)

    def test_reversed(self):
        """Test the reversed word keeps the base side"""
        assert Itinerary((1, 2, 1, 3)).reversed().word == (1, 3, 1, 2)
        assert Itinerary((1, 2, 3, 4)).reversed().word == (1, 4, 3, 2)
        word = Itinerary((1, 3, 2, 3, 2, 3))
        assert word.reversed() == word

    def test_primitive(self):
        """Test powers of shorter words"""
        assert Itinerary((1, 2, 1, 3)).is_primitive
        assert not Itinerary((1, 2, 1, 2)).is_primitive
        assert not Itinerary((1, 2, 3, 1, 2, 3)).is_primitive

    def test_letter_alternating_sum(self):
        """Test i_0 - i_1 + i_2 - ..."""
        assert Itinerary((1, 2, 3, 2)).letter_alternating_sum == 0
        assert Itinerary((1, 2, 1, 3)).letter_alternating_sum == -3

    def test_check_sides(self):
        """Test letters above the side count"""
        Itinerary((1, 2, 3)).check_sides(3)
        with pytest.raises(IllegalItineraryError):
            Itinerary((1, 2, 4)).check_sides(3)


class TestEnumerateWords:
    """Test canonical word enumeration"""

    def test_triangle_small_periods(self):
        """Test the words of period 2 and 3 over three sides"""
        assert [w.word for w in enumerate_words(3, 2)] == [(1, 2), (1, 3), (2, 3)]
        assert [w.word for w in enumerate_words(3, 3)] == [(1, 2, 3), (1, 3, 2)]

    def test_words_are_canonical_and_primitive(self):
        """Test every enumerated word is its own canonical form"""
        words = list(enumerate_words(4, 6))
        assert words
        assert len({w.word for w in words}) == len(words)
        for w in words:
            assert w.canonical() == w
            assert w.is_primitive

    def test_square_period_four(self):
        """Test the period-4 words over four sides"""
        words = {w.word for w in enumerate_words(4, 4)}
        assert (1, 2, 3, 4) in words
        assert (1, 4, 3, 2) in words
        assert (1, 3, 1, 3) not in words

    def test_degenerate_arguments(self):
        """Test empty enumeration"""
        assert list(enumerate_words(3, 1)) == []
