import pytest

from trsys.errors import AmbientMismatch, NotComposable, NotMonotone
from trsys.functorial import (
    LatticeMap,
    check_functoriality,
    compose,
    composition_counterexample,
    identity_map,
    product_projections,
    product_split,
    pushforward,
    random_monotone_map,
    sample_meet_preserving_pairs,
    split_to_factors,
)
from trsys.lattice import (
    all_lattices,
    boolean_cube,
    chain,
    is_isomorphic,
    iterated_fusion,
    product,
)
from trsys.transfer import (
    complete_system,
    discrete_system,
    enumerate_transfer_systems,
)


def test_monotone_validation():
    with pytest.raises(NotMonotone):
        LatticeMap(chain(2), chain(2), [2, 1, 0])


def test_identity_pushforward():
    lat = chain(2)
    ident = identity_map(lat)
    for system in enumerate_transfer_systems(lat):
        assert pushforward(ident, system) == system


def test_discrete_pushes_to_discrete():
    f = LatticeMap(chain(2), boolean_cube(2), [0, 2, 3])
    assert pushforward(f, discrete_system(chain(2))) == discrete_system(boolean_cube(2))


def test_pushforward_ambient_guard():
    f = identity_map(chain(2))
    with pytest.raises(AmbientMismatch):
        pushforward(f, discrete_system(chain(3)))


def test_composition_guard():
    with pytest.raises(NotComposable):
        compose(identity_map(chain(3)), identity_map(chain(2)))


def test_counterexample_reproduces():
    f, g, system = composition_counterexample()
    assert not f.is_meet_preserving()
    assert not g.is_meet_preserving()
    direct = pushforward(compose(g, f), system)
    staged = pushforward(g, pushforward(f, system))
    assert direct.refines(staged)
    assert direct != staged
    # the two extra relations come from the intermediate closure
    extra = set(staged.pairs()) - set(direct.pairs())
    assert extra == {(1, 2), (1, 3)}
    report = check_functoriality(f, g, [system])
    assert not report.holds
    assert not report.meet_preserving
    assert len(report.witnesses) == 1


def test_functoriality_on_meet_preserving_chain_maps():
    f = LatticeMap(chain(2), chain(3), [0, 1, 3])
    g = LatticeMap(chain(3), chain(2), [0, 0, 1, 2])
    assert f.is_meet_preserving() and g.is_meet_preserving()
    report = check_functoriality(f, g, list(enumerate_transfer_systems(chain(2))))
    assert report.holds and report.meet_preserving


def test_sampled_meet_preserving_pairs_compose():
    pool = [chain(1), chain(2), chain(3), boolean_cube(2), iterated_fusion(chain(2), 2)]
    pairs = sample_meet_preserving_pairs(pool, 40, seed=11)
    assert len(pairs) == 40
    for f, g in pairs:
        sample = list(enumerate_transfer_systems(f.source))
        assert check_functoriality(f, g, sample).holds


def test_sampling_is_deterministic():
    pool = [chain(2), boolean_cube(2)]
    a = sample_meet_preserving_pairs(pool, 10, seed=3)
    b = sample_meet_preserving_pairs(pool, 10, seed=3)
    assert [(f.image, g.image) for f, g in a] == [(f.image, g.image) for f, g in b]


def test_pushforward_is_monotone():
    maps = [
        LatticeMap(chain(2), boolean_cube(2), [0, 2, 3]),
        LatticeMap(boolean_cube(2), chain(2), [0, 1, 1, 2]),
        LatticeMap(chain(3), chain(2), [0, 1, 1, 2]),
    ]
    for f in maps:
        tr = enumerate_transfer_systems(f.source)
        for a in tr:
            for b in tr:
                if a.refines(b):
                    assert pushforward(f, a).refines(pushforward(f, b))


def test_tr_of_meet_preserving_map_need_not_preserve_meets():
    # the embedding of the three-chain across the diamond preserves meets,
    # but its pushforward does not
    lat = chain(2)
    f = LatticeMap(lat, boolean_cube(2), [0, 2, 3])
    assert f.is_meet_preserving()
    tr = list(enumerate_transfer_systems(lat))
    witnesses = [
        (a, b)
        for a in tr
        for b in tr
        if pushforward(f, a & b) != pushforward(f, a) & pushforward(f, b)
    ]
    assert witnesses


def test_product_split_examples():
    c1 = chain(1)
    assert product_split(discrete_system(c1), discrete_system(c1)) == discrete_system(
        product(c1, c1)
    )
    assert product_split(complete_system(c1), complete_system(c1)) == complete_system(
        product(c1, c1)
    )
    mixed = product_split(complete_system(c1), discrete_system(c1))
    assert mixed.pairs() == [(0, 2), (1, 3)]


def test_product_split_round_trip():
    c1, c2 = chain(1), chain(2)
    pq = product(c1, c2)
    for r in enumerate_transfer_systems(c1):
        for t in enumerate_transfer_systems(c2):
            system = product_split(r, t, pq)
            back_r, back_t = split_to_factors(system, c1, c2)
            assert back_r == r and back_t == t


def test_projections_are_meet_preserving():
    pq = product(chain(2), chain(1))
    left, right = product_projections(pq, chain(2), chain(1))
    assert left.is_meet_preserving() and right.is_meet_preserving()


def test_random_monotone_maps_are_monotone():
    import random

    rng = random.Random(5)
    for _ in range(25):
        f = random_monotone_map(boolean_cube(2), chain(3), rng)
        assert isinstance(f, LatticeMap)  # constructor enforces monotonicity


def test_no_small_lattice_has_three_chain_tr():
    # Tr is not essentially surjective: nothing maps onto the three-element
    # chain among lattices with at most four elements
    three_chain = chain(2)
    for n in range(1, 5):
        for lat in all_lattices(n):
            tr = enumerate_transfer_systems(lat)
            assert not is_isomorphic(tr.hasse_lattice(), three_chain)


def test_product_split_rejects_foreign_lattice():
    c1 = chain(1)
    with pytest.raises(AmbientMismatch):
        product_split(
            complete_system(c1), complete_system(c1), boolean_cube(2).dual()
        )
