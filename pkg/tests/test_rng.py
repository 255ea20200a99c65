import hashlib
import subprocess
import sys

from roguelab.rng import RngStreams, derive_seed, stream


def _oracle_derive(base_seed, name):
    # independent recomputation with hashlib only
    h = hashlib.blake2b(digest_size=8)
    h.update(name.encode("utf-8"))
    h.update((base_seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def test_derive_matches_oracle():
    for base in (0, 1, 42, 2**63, 2**64 - 1):
        for name in ("combat", "level-topology:3", "x"):
            assert derive_seed(base, name) == _oracle_derive(base, name)


def test_derive_is_name_sensitive():
    assert derive_seed(7, "a") != derive_seed(7, "b")
    assert derive_seed(7, "a") != derive_seed(8, "a")


def test_streams_are_independent():
    a1 = stream(123, "combat")
    b1 = stream(123, "monster-spawn")
    # drain one stream heavily; the other must be unaffected
    for _ in range(1000):
        a1.random()
    b2 = stream(123, "monster-spawn")
    assert [b1.random() for _ in range(10)] == [b2.random()
                                               for _ in range(10)]


def test_stream_set_seed_split():
    s = RngStreams(game_seed=5, episode_seed=9)
    s2 = RngStreams(game_seed=5, episode_seed=77)
    # world-content stream depends only on the game seed
    assert s.item_placement.random() == s2.item_placement.random()
    # dynamics streams depend on the episode seed
    t = RngStreams(game_seed=5, episode_seed=9)
    t2 = RngStreams(game_seed=5, episode_seed=77)
    assert t.combat.random() != t2.combat.random()


def test_derivation_is_stable_across_processes():
    code = ("from roguelab.rng import derive_seed;"
            "print(derive_seed(424242, 'stability-check'))")
    out = subprocess.run([sys.executable, "-c", code],
                        capture_output=True, text=True, check=True)
    assert int(out.stdout.strip()) == derive_seed(424242, "stability-check")
