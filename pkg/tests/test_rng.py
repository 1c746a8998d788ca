import numpy as np
import pytest

from qcsim.errors import DomainError
from qcsim.rng import Rng, mix64


def reference_splitmix(seed, count):
    # Classic stateful formulation: state += golden; output = mix(state).
    state = seed
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & ((1 << 64) - 1)
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & ((1 << 64) - 1)
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & ((1 << 64) - 1)
        out.append(z ^ (z >> 31))
    return out


class TestStream:
    def test_matches_stateful_reference(self):
        r = Rng(1234567)
        assert [r.next_u64() for _ in range(10)] == reference_splitmix(1234567, 10)

    def test_known_seed_zero_value(self):
        # First SplitMix64 output for seed 0 is a widely published constant.
        assert Rng(0).next_u64() == 0xE220A8397B1DCDAF

    def test_vector_and_scalar_paths_agree(self):
        a, b = Rng(99), Rng(99)
        scalar = [a.next_u64() for _ in range(50)]
        vector = b.u64_block(20).tolist() + b.u64_block(30).tolist()
        assert scalar == vector

    def test_doubles_from_same_stream(self):
        a, b = Rng(5), Rng(5)
        assert [a.random() for _ in range(20)] == b.randoms(20).tolist()

    def test_reproducible(self):
        assert Rng(7).randoms(100).tolist() == Rng(7).randoms(100).tolist()
        assert Rng(7).randoms(10).tolist() != Rng(8).randoms(10).tolist()

    def test_unit_interval(self):
        u = Rng(3).randoms(100000)
        assert u.min() >= 0 and u.max() < 1
        assert abs(u.mean() - 0.5) < 0.005

    def test_spawn_is_deterministic_and_distinct(self):
        parent = Rng(11)
        assert parent.spawn(1).seed == Rng(11).spawn(1).seed
        assert parent.spawn(1).seed != parent.spawn(2).seed
        assert parent.spawn(0).seed != parent.seed

    def test_mix64_is_bijective_on_sample(self):
        vals = {mix64(i) for i in range(5000)}
        assert len(vals) == 5000


class TestDerived:
    def test_integers_range(self):
        v = Rng(1).integers(3, 9, 10000)
        assert v.min() == 3 and v.max() == 8
        assert 3 <= Rng(1).integers(3, 9) < 9

    def test_categorical_frequencies(self):
        p = [0.1, 0.0, 0.6, 0.3]
        counts = np.bincount(Rng(2).categorical(p, 100000), minlength=4) / 100000
        assert counts[1] == 0
        assert np.allclose(counts, p, atol=0.01)

    def test_tiny_probabilities_never_sampled(self):
        idx = Rng(4).categorical([1e-15, 1.0, 1e-16], 10000)
        assert set(idx.tolist()) == {1}

    def test_bad_probabilities(self):
        with pytest.raises(DomainError):
            Rng(0).categorical([0, 0], 1)
        with pytest.raises(DomainError):
            Rng(0).categorical([-0.5, 1.5], 1)

    def test_normals(self):
        z = Rng(8).normals(100001)
        assert z.size == 100001
        assert abs(z.mean()) < 0.02 and abs(z.std() - 1) < 0.02
