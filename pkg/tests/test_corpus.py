"""Tests for seeds, branch distances, execution, the queue and seed files."""

import json
from pathlib import Path

import pytest

from statefuzz.corpus import (
    SEED_SCHEMA,
    ZERO,
    Distance,
    ExecutionSettings,
    PackageMismatchError,
    Seed,
    SeedExecutor,
    SeedFile,
    SeedFileError,
    SeedQueue,
    branch_distance,
    comparison_distance,
    derive_seed,
    seed_distances,
    select_seeds,
)
from statefuzz.depgraph.models import SequenceTemplate
from statefuzz.vm import FINNEY, BlockEnv, CmpEvent, TxInput, execute_sequence

OWNER, USER, ATTACKER = 0x1000, 0x2000, 0x3000

DEPLOY_ONLY = SequenceTemplate(("constructor",))


def make_seed(executor, calls: list[tuple[str, int, int, list[int]]]) -> Seed:
    """A seed for (function, sender, value, args) calls, constructor first."""
    template = SequenceTemplate(tuple(name for name, *_ in calls))
    inputs = [executor.codec.encode(name, sender, value, args) for name, sender, value, args in calls]
    return Seed(template, inputs)


def bare_seed(covered: set | None = None, distances: dict | None = None) -> Seed:
    seed = Seed(DEPLOY_ONLY, [TxInput("constructor", OWNER)])
    seed.covered_branches = set(covered or ())
    seed.min_distances = dict(distances or {})
    return seed


def cmp(op: str, a: int, b: int, inner: int | None = None) -> CmpEvent:
    return CmpEvent(pc=0, op=op, a=a, b=b, result=0, step=0, inner=inner)


class TestDistance:
    """Tests for comparison and branch distances."""

    @pytest.mark.parametrize(
        "op,a,b,want_true,expected",
        [
            ("EQ", 5, 9, True, 4),
            ("EQ", 5, 5, True, 0),
            ("EQ", 5, 5, False, 1),
            ("EQ", 5, 9, False, 0),
            ("LT", 9, 5, True, 5),
            ("LT", 3, 5, True, 0),
            ("LT", 3, 5, False, 2),
            ("GT", 3, 5, True, 3),
            ("GT", 9, 5, False, 4),
            ("GT", 3, 5, False, 0),
        ],
    )
    def test_comparison_distance(self, op: str, a: int, b: int, want_true: bool, expected: int) -> None:
        """Test distances of each comparison toward either outcome."""
        assert comparison_distance([cmp(op, a, b)], 0, want_true) == Distance(expected)

    def test_iszero_negates_inner(self):
        """Test that ISZERO over a comparison flips the wanted outcome."""
        events = [cmp("EQ", 87, 88), cmp("ISZERO", 1, 0, inner=0)]

        assert comparison_distance(events, 1, want_true=False) == Distance(1)
        assert comparison_distance(events, 1, want_true=True) == ZERO

    def test_plain_iszero(self):
        """Test ISZERO over a value that came from no comparison."""
        assert comparison_distance([cmp("ISZERO", 7, 0)], 0, want_true=True) == Distance(7)
        assert comparison_distance([cmp("ISZERO", 0, 0)], 0, want_true=False) == Distance(1)

    def test_unsupported_op(self):
        """Test that unknown comparison ops are refused."""
        with pytest.raises(ValueError):
            comparison_distance([cmp("AND", 1, 1)], 0, want_true=True)

    def test_ordering(self):
        """Test that distances order by magnitude and zero is satisfied."""
        assert Distance(1) < Distance(2)
        assert ZERO.satisfied
        assert not Distance(3).satisfied

    def test_payment_distance(self, guess_number):
        """Test that an 87 finney guess is one finney from the guarded arm."""
        traces, _ = execute_sequence(
            guess_number,
            [TxInput("constructor", OWNER), TxInput("guess", USER, 87 * FINNEY, (55,))],
        )
        (event,) = traces[1].branch_events
        guarded = guess_number.cfg.opposite(event.branch_id)

        assert branch_distance(traces[1], guarded) == Distance(FINNEY)
        assert branch_distance(traces[1], event.branch_id) == ZERO

    def test_unexecuted_branch_has_no_distance(self, guess_number):
        """Test that branches whose JUMPI never ran are absent."""
        traces, _ = execute_sequence(
            guess_number,
            [TxInput("constructor", OWNER), TxInput("guess", USER, 0, (55,))],
        )
        inner = guess_number.cfg.branch_ids[-1]

        assert branch_distance(traces[1], inner) is None
        assert inner not in seed_distances(traces, guess_number.cfg.branch_ids)


class TestSeed:
    """Tests for the seed model."""

    def test_input_count_must_match(self):
        """Test that inputs must line up with template calls."""
        with pytest.raises(ValueError):
            Seed(SequenceTemplate(("constructor", "invest")), [TxInput("constructor", OWNER)])

    def test_stream_concatenates_inputs(self, make_executor, crowdsale):
        """Test that a seed's stream is its inputs' bytes in order."""
        seed = make_seed(make_executor(crowdsale), [("constructor", OWNER, 0, []), ("invest", USER, 0, [9])])

        assert len(seed.stream) == 33 + 65
        assert seed.functions == ["constructor", "invest"]
        assert not seed.executed


class TestSeedExecutor:
    """Tests for deterministic seed execution."""

    def test_execute_annotates_seed(self, make_executor, crowdsale):
        """Test coverage, distances and indices after execution."""
        executor = make_executor(crowdsale)
        seed = make_seed(executor, [("constructor", OWNER, 0, []), ("invest", USER, 0, [9])])

        executor.execute(seed)

        assert executor.executions == 1
        assert seed.execution_index == 0
        assert len(seed.traces) == 2
        assert seed.covered_branches
        assert set(seed.min_distances).isdisjoint(seed.covered_branches)

    def test_replay_is_not_counted(self, make_executor, crowdsale):
        """Test that replaying leaves the execution counter alone."""
        executor = make_executor(crowdsale)
        seed = make_seed(executor, [("constructor", OWNER, 0, [])])
        executor.execute(seed)

        executor.replay(seed, [])

        assert executor.executions == 1

    def test_outcome_streams_are_reproducible(self, make_executor, corpus):
        """Test that the same root seed gives the same call outcomes per index."""
        package = corpus.load("ue_vulnerable")
        calls = [("constructor", OWNER, 0, []), ("pay", USER, FINNEY, [OWNER])]
        runs = []
        for _ in range(2):
            executor = make_executor(package, rng_seed=11)
            seeds = [make_seed(executor, calls) for _ in range(8)]
            executor.execute_batch(seeds)
            runs.append([seed.outcomes for seed in seeds])

        assert runs[0] == runs[1]
        assert all(len(outcomes) == 1 for outcomes in runs[0])

    def test_workers_do_not_change_results(self, make_executor, corpus):
        """Test that parallel batches match sequential ones."""
        package = corpus.load("ue_vulnerable")
        calls = [("constructor", OWNER, 0, []), ("pay", USER, FINNEY, [OWNER])]
        results = []
        for workers in (1, 4):
            executor = make_executor(package, rng_seed=5, workers=workers)
            seeds = [make_seed(executor, calls) for _ in range(10)]
            executor.execute_batch(seeds)
            results.append([(s.execution_index, s.outcomes, s.covered_branches) for s in seeds])

        assert results[0] == results[1]

    def test_callbacks_fire_in_index_order(self, corpus):
        """Test that the result callback sees executions in index order."""
        seen: list[int] = []
        executor = SeedExecutor(
            corpus.load("crowdsale"),
            ExecutionSettings(workers=3),
            on_result=lambda seed, traces: seen.append(seed.execution_index),
        )
        executor.execute_batch([make_seed(executor, [("constructor", OWNER, 0, [])]) for _ in range(6)])

        assert seen == list(range(6))

    def test_derive_seed(self):
        """Test that derived seeds are stable and label-sensitive."""
        assert derive_seed(1, "exec", 0) == derive_seed(1, "exec", 0)
        assert derive_seed(1, "exec", 0) != derive_seed(1, "exec", 1)
        assert derive_seed(1, "exec") != derive_seed(2, "exec")
        assert 0 <= derive_seed(0) < 1 << 64


class TestSeedQueue:
    """Tests for queue admission, coverage and eviction."""

    def test_admit_assigns_ids_and_coverage(self):
        """Test that admitted seeds get ids and extend global coverage."""
        queue = SeedQueue([(0, 1), (0, 2)])
        first, second = bare_seed({(0, 1)}), bare_seed({(0, 1), (9, 9)})

        queue.admit(first)
        queue.admit(second)

        assert (first.seed_id, second.seed_id) == (0, 1)
        assert queue.global_coverage == {(0, 1)}
        assert queue.coverage_percent == 50.0
        assert queue.uncovered == {(0, 2)}
        assert not queue.complete

    def test_no_branches_is_complete(self):
        """Test that a contract without branches starts fully covered."""
        queue = SeedQueue([])
        assert queue.complete
        assert queue.coverage_percent == 100.0

    def test_eviction_keeps_unique_coverage(self):
        """Test that a full queue drops the seed with the fewest unique branches."""
        queue = SeedQueue([(0, 1), (0, 2), (0, 3)], cap=2)
        keeper = bare_seed({(0, 1)})
        redundant = bare_seed({(0, 2)})
        wider = bare_seed({(0, 2), (0, 3)})

        for seed in (keeper, redundant, wider):
            queue.admit(seed)

        assert queue.seeds == [keeper, wider]
        assert queue.evicted == 1
        assert queue.complete


class TestSelectSeeds:
    """Tests for coverage- and distance-driven selection."""

    def test_new_coverage_is_admitted(self):
        """Test that seeds reaching unseen branches always enter the queue."""
        queue = SeedQueue([(0, 1), (0, 2)])
        covering = bare_seed({(0, 1)})
        stale = bare_seed({(0, 1)})

        assert select_seeds(queue, [covering, stale]) == [covering]

    def test_closest_seed_per_branch(self):
        """Test that only the seed closest to an uncovered branch is admitted."""
        queue = SeedQueue([(0, 1), (0, 2)])
        far = bare_seed(distances={(0, 2): Distance(5)})
        near = bare_seed(distances={(0, 2): Distance(3)})

        admitted = select_seeds(queue, [far, near])

        assert admitted == [near]
        assert near.distance_gain and not far.distance_gain
        assert queue.best_distances[(0, 2)] == Distance(3)

    def test_distance_must_beat_baseline(self):
        """Test that later seeds must improve on the best known distance."""
        queue = SeedQueue([(0, 1)])
        select_seeds(queue, [bare_seed(distances={(0, 1): Distance(3)})])

        worse = bare_seed(distances={(0, 1): Distance(4)})
        better = bare_seed(distances={(0, 1): Distance(2)})

        assert select_seeds(queue, [worse]) == []
        assert select_seeds(queue, [better]) == [better]

    def test_admitted_in_execution_order(self):
        """Test that the returned seeds keep candidate order."""
        queue = SeedQueue([(0, 1), (0, 2)])
        close = bare_seed(distances={(0, 2): Distance(1)})
        covering = bare_seed({(0, 1)})

        assert select_seeds(queue, [close, covering]) == [close, covering]


class TestSeedFile:
    """Tests for seed file serialization and replay checks."""

    @pytest.fixture
    def executed_seed(self, make_executor, corpus):
        executor = make_executor(corpus.load("ue_vulnerable"), rng_seed=3)
        seed = make_seed(executor, [("constructor", OWNER, 0, []), ("pay", USER, FINNEY, [ATTACKER])])
        executor.execute(seed)
        return seed

    def test_write_and_read(self, corpus, accounts, executed_seed, tmp_path: Path):
        """Test that a written seed file reads back to the same seed."""
        package = corpus.load("ue_vulnerable")
        seed_file = SeedFile.from_seed(executed_seed, package, accounts, BlockEnv())
        path = tmp_path / "seeds" / "seed.json"

        seed_file.write(path)
        restored = SeedFile.read(path)

        assert restored == seed_file
        assert json.loads(path.read_text())["schema"] == SEED_SCHEMA
        seed = restored.to_seed(package)
        assert seed.stream == executed_seed.stream
        assert seed.origin == "replay"

    def test_package_mismatch(self, corpus, accounts, executed_seed):
        """Test that seeds refuse to decode against another package."""
        seed_file = SeedFile.from_seed(executed_seed, corpus.load("ue_vulnerable"), accounts, BlockEnv())

        with pytest.raises(PackageMismatchError) as exc_info:
            seed_file.to_seed(corpus.load("ue_patched"))

        assert exc_info.value.expected == seed_file.package_hash

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda d: d.update(schema="statefuzz.seed/0"),
            lambda d: d.pop("inputs"),
            lambda d: d["inputs"].pop(),
            lambda d: d["inputs"][0].update(raw="zz"),
        ],
    )
    def test_malformed_documents(self, corpus, accounts, executed_seed, mutate) -> None:
        """Test that broken documents raise SeedFileError."""
        data = SeedFile.from_seed(executed_seed, corpus.load("ue_vulnerable"), accounts, BlockEnv()).to_dict()
        mutate(data)

        with pytest.raises(SeedFileError):
            SeedFile.from_dict(data)

    @pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
    def test_unreadable_files(self, tmp_path: Path, content: str) -> None:
        """Test that invalid JSON and non-objects are refused."""
        path = tmp_path / "seed.json"
        path.write_text(content)

        with pytest.raises(SeedFileError):
            SeedFile.read(path)

    def test_missing_file(self, tmp_path: Path):
        """Test that a missing file is a SeedFileError."""
        with pytest.raises(SeedFileError):
            SeedFile.read(tmp_path / "absent.json")
