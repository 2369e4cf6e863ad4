import itertools
import random

import pytest

from modconv import (
    PlanEntry,
    PlanFormatError,
    PlanKey,
    PlanSession,
    PlanStore,
    make_exec_signature,
    moddft,
    get_table,
    plan_mirror,
    store_load,
    store_save,
)
from modconv.planner import STORE_VERSION

from conftest import LARGE_PRIME, random_vec


def fake_timer():
    ticks = itertools.count(step=7)
    return lambda: next(ticks)


def make_session(store=None, sig="test-host;cores=1;threads=1;build=test", reps=3):
    return PlanSession(store or PlanStore(), signature=sig, timer=fake_timer(), reps=reps)


class TestPlanKeyEntry:
    def test_total_ordering(self):
        keys = [
            PlanKey("tft", 17, 8, 8, 8, 1),
            PlanKey("dft", 17, 8, 0, 8, 1),
            PlanKey("dft", 17, 4, 0, 4, 1),
            PlanKey("dft", 17, 8, 0, 8, 2),
        ]
        assert sorted(keys) == sorted(keys, reverse=True)[::-1]
        assert sorted(keys)[0] == PlanKey("dft", 17, 4, 0, 4, 1)

    def test_key_validation(self):
        with pytest.raises(ValueError):
            PlanKey("nope", 17, 8, 0, 8, 1)
        with pytest.raises(ValueError):
            PlanKey("dft", 17, 12, 0, 12, 1)
        with pytest.raises(ValueError):
            PlanKey("dft", 17, 8, 0, 8, 0)

    def test_entry_validation(self):
        key = PlanKey("dft", 17, 16, 0, 16, 1)
        PlanEntry(key, (2, 2), 4, 10, "sig")  # 2*2*4 == 16
        with pytest.raises(ValueError):
            PlanEntry(key, (2,), 4, 10, "sig")  # product 8
        with pytest.raises(ValueError):
            PlanEntry(key, (2, 2), 5, 10, "sig")  # base outside menu
        with pytest.raises(ValueError):
            PlanEntry(key, (2, 2), 4, -1, "sig")
        with pytest.raises(ValueError):
            PlanEntry(key, (2, 2), 4, 10, "si|g")


class TestMirror:
    def test_reverses_splits(self):
        key = PlanKey("tft", 17, 64, 64, 64, 1)
        entry = PlanEntry(key, (2, 4), 8, 123, "sig")
        mirrored = plan_mirror(entry)
        assert mirrored.key.kind == "itft"
        assert mirrored.splits == (4, 2)
        assert mirrored.base_case == 8

    def test_involution(self):
        entry = PlanEntry(PlanKey("tft", 17, 16, 16, 16, 1), (2, 2), 4, 9, "sig")
        assert plan_mirror(plan_mirror(entry)) == entry

    def test_rejects_wrong_kind(self):
        entry = PlanEntry(PlanKey("dft", 17, 16, 0, 16, 1), (2, 2), 4, 9, "sig")
        with pytest.raises(ValueError):
            plan_mirror(entry)


class TestStoreFormat:
    def test_empty_store_is_header_only(self, tmp_path):
        path = tmp_path / "plans.txt"
        store_save(PlanStore(), str(path))
        assert path.read_text() == f"{STORE_VERSION}\n"
        assert store_load(str(path)) == PlanStore()

    def test_single_entry_two_lines(self, tmp_path):
        store = PlanStore()
        store.add(PlanEntry(PlanKey("dft", 17, 8, 0, 8, 1), (2,), 4, 55, "sig"))
        path = tmp_path / "plans.txt"
        store_save(store, str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1] == "dft|17|8|0|8|1|splits=2|base=4|nanos=55|sig=sig"

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "plans.txt"
        path.write_text("modconv-plan v2\n")
        with pytest.raises(PlanFormatError) as err:
            store_load(str(path))
        assert err.value.line == 1

    def test_malformed_line_number(self, tmp_path):
        path = tmp_path / "plans.txt"
        good = "dft|17|8|0|8|1|splits=2|base=4|nanos=55|sig=sig"
        path.write_text(f"{STORE_VERSION}\n{good}\ndft|oops\n")
        with pytest.raises(PlanFormatError) as err:
            store_load(str(path))
        assert err.value.line == 3

    def test_fuzzed_round_trips(self, tmp_path):
        rng = random.Random(4242)
        for trial in range(100):
            store = PlanStore()
            for _ in range(rng.randint(0, 12)):
                lg = rng.randint(1, 8)
                splits = []
                rest = lg
                while rest > 3 or (rest > 1 and rng.random() < 0.5):
                    step = rng.choice([s for s in (1, 2, 3) if s <= rest - 1])
                    splits.append(1 << step)
                    rest -= step
                key = PlanKey(
                    rng.choice(("dft", "tft", "itft")),
                    rng.choice((17, 257, LARGE_PRIME)),
                    1 << lg,
                    rng.randint(0, 1 << lg),
                    rng.randint(0, 1 << lg),
                    rng.randint(1, 16),
                )
                entry = PlanEntry(
                    key,
                    tuple(splits),
                    1 << rest,
                    rng.randrange(10**12),
                    f"host-{rng.randint(0, 5)};threads={rng.randint(1, 8)}",
                )
                try:
                    store.add(entry)
                except ValueError:
                    continue  # fuzzer hit an existing (key, sig) slot
            path = tmp_path / f"fuzz-{trial}.txt"
            store_save(store, str(path))
            assert store_load(str(path)) == store, trial

    def test_duplicate_slot_rejected(self):
        store = PlanStore()
        entry = PlanEntry(PlanKey("dft", 17, 8, 0, 8, 1), (2,), 4, 55, "sig")
        store.add(entry)
        with pytest.raises(ValueError):
            store.add(entry)


class TestLookupPolicy:
    def test_fresh_key_triggers_search_and_grows_store(self):
        session = make_session()
        key = PlanKey("tft", LARGE_PRIME, 8, 8, 8, 1)
        assert len(session.store) == 0
        entry = session.lookup(key)
        assert session.search_count == 1
        assert len(session.store) == 1
        assert entry.key == key

    def test_exact_hit_performs_no_search(self):
        session = make_session()
        key = PlanKey("dft", LARGE_PRIME, 8, 0, 8, 1)
        session.lookup(key)
        searches = session.search_count
        hit = session.lookup(key)
        assert session.search_count == searches
        assert hit.exec_signature == session.signature

    def test_signature_miss_clones_without_search(self):
        store = PlanStore()
        original = PlanEntry(PlanKey("dft", 17, 8, 0, 8, 1), (2,), 4, 55, "other-host")
        store.add(original)
        session = make_session(store, sig="this-host")
        clone = session.lookup(original.key)
        assert session.search_count == 0
        assert clone.exec_signature == "this-host"
        assert clone.splits == original.splits
        assert store.get(original.key, "other-host") == original
        assert len(store) == 2

    def test_conv_kind_is_not_searchable(self):
        session = make_session()
        with pytest.raises(ValueError):
            session.search(PlanKey("conv", 17, 8, 0, 8, 1))


class TestDftSearch:
    def test_candidates_cover_menu_and_winner_is_minimal(self):
        session = make_session()
        key = PlanKey("dft", LARGE_PRIME, 8, 0, 8, 1)
        entry = session.search(key)
        shapes = {(s, b) for s, b, _ in session.last_candidates}
        # Composed candidates use the stored best sub-plans, so the direct
        # codelet plus one composition per menu radix must appear.
        assert ((), 8) in shapes
        assert len(shapes) == 3
        best = min(ns for _, _, ns in session.last_candidates)
        assert entry.measured_nanos == best

    def test_bottom_up_fills_smaller_sizes(self):
        session = make_session()
        session.search(PlanKey("dft", LARGE_PRIME, 64, 0, 64, 1))
        for size in (2, 4, 8, 16, 32, 64):
            assert session.store.entries_for_key(
                PlanKey("dft", LARGE_PRIME, size, 0, size, 1)
            ), size

    def test_stored_plans_replay_bit_correct(self, fp998, rng):
        session = make_session()
        session.search(PlanKey("dft", fp998.p, 64, 0, 64, 1))
        for entry in session.store:
            table = get_table(fp998, entry.key.L)
            x = random_vec(rng, fp998, entry.key.L)
            assert session.replay(entry, x) == moddft(x, table)

    def test_truncated_replay_roundtrip(self, fp998, rng):
        session = make_session()
        fwd = session.lookup(PlanKey("tft", fp998.p, 32, 20, 20, 1))
        inv = plan_mirror(fwd)
        session.store.add(inv)
        x = random_vec(rng, fp998, 20)
        spectral = session.replay(fwd, x)
        scaled = session.replay(inv, spectral)
        assert scaled == [v * 32 % fp998.p for v in x]

    def test_extrapolation_beyond_cap(self):
        session = PlanSession(
            PlanStore(), signature="sig", timer=fake_timer(), reps=2, search_cap=16
        )
        entry = session.search(PlanKey("dft", LARGE_PRIME, 128, 0, 128, 1))
        capped = session.store.entries_for_key(PlanKey("dft", LARGE_PRIME, 16, 0, 16, 1))[0]
        assert entry.splits[:3] == (2, 2, 2)
        assert entry.splits[3:] == capped.splits
        assert entry.base_case == capped.base_case

    def test_search_rejects_infeasible_key(self, fp17):
        session = make_session()
        from modconv import UnsupportedSizeError

        with pytest.raises(UnsupportedSizeError):
            session.search(PlanKey("dft", 17, 64, 0, 64, 1))


class TestResolveEngine:
    def _stocked_session(self, tft_nanos, dft_nanos, mult_ns=50):
        session = make_session()
        p = LARGE_PRIME
        for z in (8, 9, 15, 16):
            session.store.add(
                PlanEntry(PlanKey("tft", p, 16, z, 15, 1), (2, 2, 2), 2, tft_nanos, session.signature)
            )
        session.store.add(
            PlanEntry(PlanKey("itft", p, 16, 15, 15, 1), (2, 2, 2), 2, tft_nanos, session.signature)
        )
        session.store.add(
            PlanEntry(PlanKey("dft", p, 16, 0, 16, 1), (2, 2), 4, dft_nanos, session.signature)
        )
        session._mult_nanos[p] = mult_ns
        return session

    def test_prefers_cheap_transforms_over_definition(self, fp998):
        session = self._stocked_session(tft_nanos=10, dft_nanos=1000)
        assert session.resolve_engine(fp998, 8, 8, 1) == "tft"

    def test_prefers_fft_when_it_measures_faster(self, fp998):
        session = self._stocked_session(tft_nanos=10**6, dft_nanos=10)
        assert session.resolve_engine(fp998, 8, 8, 1) == "fft_pad"

    def test_prefers_definition_for_tiny_products(self, fp998):
        session = self._stocked_session(tft_nanos=10**6, dft_nanos=10**6)
        assert session.resolve_engine(fp998, 8, 8, 1) == "definition"

    def test_scalar_product_short_circuits(self, fp998):
        session = make_session()
        assert session.resolve_engine(fp998, 1, 1, 1) == "definition"

    def test_low_adicity_falls_back_to_definition(self, fp17):
        from modconv import FourierPrime

        fp7 = FourierPrime.from_modulus(7)
        session = make_session()
        assert session.resolve_engine(fp7, 5, 5, 1) == "definition"


class TestSignature:
    def test_contains_the_advertised_parts(self):
        sig = make_exec_signature(threads=3)
        assert "threads=3" in sig
        assert "cores=" in sig
        assert "build=modconv-" in sig
        assert "|" not in sig and "\n" not in sig

    def test_stable_within_a_host(self):
        assert make_exec_signature(2) == make_exec_signature(2)
