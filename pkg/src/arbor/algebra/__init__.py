"""Exact arithmetic kernel: rationals, number fields, binary forms,
finite fields, and integer factorization."""

from arbor.algebra.binforms import (
    BinaryForm,
    discriminant,
    normalize,
    normalize_joint,
    resultant,
    squarefree_part,
)
from arbor.algebra.finitefield import FFElem, FiniteField
from arbor.algebra.finitefield import extension as ff_extension
from arbor.algebra.finitefield import factor as ff_factor
from arbor.algebra.finitefield import prime_field
from arbor.algebra.integers import IntFactors, factor_integer, is_prime, primes_up_to
from arbor.algebra.numberfield import NFElem, NumberFieldSpec, nf_norm, rationals


def poly_compose_hom(outer, inner):
    """Homogeneous composition of map pairs; degrees multiply.

    `outer` and `inner` are (num, den) pairs of equal-degree binary
    forms; the result is the pair of the composite map, jointly
    normalized to content one.
    """
    from arbor.algebra.binforms import compose_pair

    on, od = outer
    inn, ind = inner
    num = compose_pair(on, inn, ind)
    den = compose_pair(od, inn, ind)
    return tuple(normalize_joint([num, den]))


__all__ = [
    "BinaryForm",
    "FFElem",
    "FiniteField",
    "IntFactors",
    "NFElem",
    "NumberFieldSpec",
    "discriminant",
    "factor_integer",
    "ff_extension",
    "ff_factor",
    "is_prime",
    "nf_norm",
    "normalize",
    "normalize_joint",
    "poly_compose_hom",
    "prime_field",
    "primes_up_to",
    "rationals",
    "resultant",
    "squarefree_part",
]
