"""Arc arithmetic, multiplicity profiles, bilateral-shift detection and
cover peeling."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from woldlab import catalog
from woldlab.core import HVector
from woldlab.errors import MalformedInputError, PreconditionError
from woldlab.spectral import (
    Arc,
    MultiplicityProfile,
    SpectralUnitary,
    arc_double,
    bilateral_cover,
    has_wandering_vector,
    is_bilateral_shift,
    multiplicity_profile,
    spectral_of_extension,
)
from woldlab.wold import WoldResult

F = Fraction


def arc(start, length):
    return Arc(F(start), F(length))


# -- arcs -----------------------------------------------------------------------


def test_arc_normalizes_start():
    assert arc("5/4", "1/2").start == F(1, 4)


def test_arc_rejects_bad_length():
    with pytest.raises(MalformedInputError):
        arc(0, 0)
    with pytest.raises(MalformedInputError):
        arc(0, "3/2")


def test_arc_double_quarter():
    (img,) = arc_double(arc(0, "1/4"))
    assert (img.start, img.length) == (F(0), F(1, 2))


def test_arc_double_majority_covers_circle():
    (img,) = arc_double(arc(0, "3/5"))
    assert img.is_full


def test_arc_double_wraps():
    (img,) = arc_double(arc("2/5", "1/5"))
    assert (img.start, img.length) == (F(4, 5), F(2, 5))
    # wrapped arc covers [4/5, 1) and [0, 1/5)
    assert img.contains(F(9, 10)) and img.contains(F(1, 10))
    assert not img.contains(F(1, 2))


@settings(max_examples=80, deadline=None)
@given(st.fractions(min_value=0, max_value=F(59, 60), max_denominator=60),
       st.fractions(min_value=F(1, 60), max_value=1, max_denominator=60))
def test_arc_double_measure(start, length):
    (img,) = arc_double(Arc(start, length))
    assert img.length == min(2 * length, F(1))


# -- profiles --------------------------------------------------------------------


def test_full_circle_profile_constant():
    p = multiplicity_profile(SpectralUnitary((Arc.full_circle(),)))
    assert p.breakpoints == (F(0),) and p.values == (1,)


def test_kerchy_profile():
    p = multiplicity_profile(catalog.example_kerchy())
    assert p.breakpoints == (F(0), F(3, 5))
    assert p.values == (3, 1)


def test_two_half_arcs_merge_to_constant():
    u = SpectralUnitary((arc(0, "1/2"), arc("1/2", "1/2")))
    p = multiplicity_profile(u)
    assert p.breakpoints == (F(0),) and p.values == (1,)


def test_profile_additivity_under_direct_sum():
    a = SpectralUnitary((arc(0, "1/3"), arc("1/4", "1/2")))
    b = SpectralUnitary((arc("1/6", "2/3"),), ((F(1, 7), 2),))
    direct = multiplicity_profile(a.direct_sum(b))
    summed = multiplicity_profile(a).pointwise_add(multiplicity_profile(b))
    assert direct == summed


@settings(max_examples=60, deadline=None)
@given(st.lists(
    st.tuples(st.fractions(min_value=0, max_value=F(23, 24), max_denominator=24),
              st.fractions(min_value=F(1, 24), max_value=1, max_denominator=24)),
    min_size=0, max_size=4))
def test_profile_additivity_random(arc_specs):
    pieces = tuple(Arc(s, l) for s, l in arc_specs)
    u = SpectralUnitary(pieces)
    total = multiplicity_profile(u)
    if not pieces:
        assert total.values == (0,)
        return
    acc = multiplicity_profile(SpectralUnitary((pieces[0],)))
    for piece in pieces[1:]:
        acc = acc.pointwise_add(multiplicity_profile(SpectralUnitary((piece,))))
    assert acc == total


# -- bilateral shift test -----------------------------------------------------------


def test_full_circle_is_bilateral_shift():
    f = is_bilateral_shift(SpectralUnitary((Arc.full_circle(),)))
    assert f.value


def test_kerchy_is_not_bilateral_shift():
    f = is_bilateral_shift(catalog.example_kerchy())
    assert not f.value
    assert f.reason == "non-constant multiplicity"


def test_proper_arc_is_not_bilateral_shift():
    f = is_bilateral_shift(catalog.arc_restriction())
    assert not f.value
    assert f.reason == "support not full circle"
    assert f.obstruction == arc("1/2", "1/2")


def test_atoms_block_bilateral_shift():
    u = SpectralUnitary((Arc.full_circle(),), ((F(0), 1),))
    f = is_bilateral_shift(u)
    assert not f.value
    assert f.reason == "atomic spectrum present"


# -- wandering vectors ----------------------------------------------------------------


def test_proper_arc_has_no_wandering_vector():
    f = has_wandering_vector(catalog.arc_restriction())
    assert not f.value
    assert f.obstruction == arc("1/2", "1/2")


def test_kerchy_has_wandering_vector():
    assert has_wandering_vector(catalog.example_kerchy()).value


def test_atoms_only_has_no_wandering_vector():
    u = SpectralUnitary((), ((F(0), 2), (F(1, 3), 1)))
    assert not has_wandering_vector(u).value


# -- covers ------------------------------------------------------------------------


def test_kerchy_cover_three_layers():
    cover = bilateral_cover(catalog.example_kerchy())
    assert cover.success
    assert len(cover.layers) == 3
    for layer in cover.layers:
        assert is_bilateral_shift(layer.spectral()).value
    assert cover.assignment_profile() == multiplicity_profile(catalog.example_kerchy())


def test_constant_two_cover_is_disjoint():
    u = SpectralUnitary((Arc.full_circle(), Arc.full_circle()))
    cover = bilateral_cover(u)
    assert cover.success and len(cover.layers) == 2
    assert all(not s.reused for layer in cover.layers for s in layer.slices)


def test_proper_arc_cover_refused():
    cover = bilateral_cover(catalog.arc_restriction())
    assert not cover.success
    assert cover.reason == "support not full circle"
    assert cover.obstruction == arc("1/2", "1/2")


def test_atom_blocks_cover():
    u = SpectralUnitary((Arc.full_circle(),), ((F(1, 3), 1),))
    cover = bilateral_cover(u)
    assert not cover.success
    assert cover.reason == "atomic spectrum present"


@settings(max_examples=60, deadline=None)
@given(st.lists(
    st.tuples(st.fractions(min_value=0, max_value=F(19, 20), max_denominator=20),
              st.fractions(min_value=F(1, 20), max_value=1, max_denominator=20)),
    min_size=1, max_size=4))
def test_implication_chain(arc_specs):
    """bilateral shift => has wandering vector => cover succeeds."""
    u = SpectralUnitary(tuple(Arc(s, l) for s, l in arc_specs))
    shift = is_bilateral_shift(u)
    wandering = has_wandering_vector(u)
    cover = bilateral_cover(u)
    if shift.value:
        assert wandering.value
    if wandering.value:
        assert cover.success
        assert len(cover.layers) == multiplicity_profile(u).max_value
        for layer in cover.layers:
            assert is_bilateral_shift(layer.spectral()).value
        assert cover.assignment_profile() == multiplicity_profile(u)
    else:
        assert not cover.success


def test_restriction_of_full_circle_flips_verdict():
    """Restricting a bilateral shift to a proper arc never stays a
    bilateral shift."""
    for denom in (3, 4, 5, 8):
        for num in range(1, denom):
            piece = arc(0, F(num, denom))
            if piece.is_full:
                continue
            assert is_bilateral_shift(SpectralUnitary((piece,))).value is False


# -- combining with Wold data ----------------------------------------------------------


def _stub_wold(k, exact=True):
    return WoldResult(tuple(HVector.basis(0, i) for i in range(k)), (), 0, exact)


def test_extension_spectrum_adds_full_circles():
    u = SpectralUnitary((arc(0, "1/2"),))
    ext = spectral_of_extension(_stub_wold(1), u)
    p = multiplicity_profile(ext)
    assert p.breakpoints == (F(0), F(1, 2))
    assert p.values == (2, 1)


def test_extension_of_empty_unitary_part():
    ext = spectral_of_extension(_stub_wold(1), SpectralUnitary(()))
    assert is_bilateral_shift(ext).value
    ext = spectral_of_extension(_stub_wold(3), SpectralUnitary(()))
    p = multiplicity_profile(ext)
    assert p.values == (3,)


def test_extension_requires_exact_wold():
    with pytest.raises(PreconditionError):
        spectral_of_extension(_stub_wold(1, exact=False), SpectralUnitary(()))


def test_kerchy_alpha_must_cover():
    with pytest.raises(MalformedInputError):
        catalog.example_kerchy(arc(0, "1/4"))


def test_final_example_report():
    report = catalog.example_final(arc(0, "1/2"), 2)
    assert not report.wandering_finding.value
    assert report.hws_equals_hs
    p = multiplicity_profile(report.extension_spectrum)
    assert p.values == (3, 2)
