import json
from concurrent.futures import ThreadPoolExecutor

import pytest

from modules.cli import records
from modules.cli.cache import ResultCache
from modules.cli.records import JobSpec, PoincareTerm, ResultRecord, to_csv
from modules.cli.runner import parse_link, run
from modules.utils.config import get_settings
from modules.utils.errors import InvalidInputError

HOPF = "X+ 1 2 3 4\nX+ 3 4 1 2\n"


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch, tmp_path):
    monkeypatch.setenv("KR_MAX_ROWS", "4096")
    monkeypatch.setenv("KR_CACHE_DIR", str(tmp_path / "default-cache"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def output(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_parse_link():
    assert parse_link("torus:2:5") == 5
    assert parse_link("torus:2:-3") == -3
    for text in ("torus:3:5", "torus:2", "torus:2:five"):
        with pytest.raises(InvalidInputError):
            parse_link(text)


def test_job_key_is_canonical():
    first = JobSpec(command="cable-s2", n=2, params={"k": 1, "base": "slice"})
    second = JobSpec(command="cable-s2", n=2, params={"base": "slice", "k": 1})
    assert first.key() == second.key()
    assert first.key() != JobSpec(command="cable-s2", n=2, params={"base": "slice", "k": 2}).key()


def test_version_bump_changes_key(monkeypatch):
    job = JobSpec(command="cable-s2", n=2, params={"k": 1, "base": "slice"})
    before = job.key()
    monkeypatch.setattr(records, "TOOL_VERSION", "999.0")
    assert job.key() != before


def test_csv_projection():
    record = ResultRecord(object="x", poincare=[PoincareTerm(t=0, q=-1, rank=1), PoincareTerm(t=-2, q=3, rank=2)])
    assert to_csv(record) == "t,q,rank\n0,-1,1\n-2,3,2\n"


def test_cache_round_trip(tmp_path):
    cache = ResultCache(tmp_path)
    job = JobSpec(command="cable-s2", n=2, params={"base": "slice", "k": 1})
    assert cache.lookup(job) is None
    record = ResultRecord(object="slice_(2,3)", N=2, s=2, input_hash=job.key())
    path = cache.store(job, record)
    assert path.parent.name == job.key()[:2]
    assert cache.lookup(job) == record
    assert not list(path.parent.glob(".tmp-*"))


def test_cache_ignores_foreign_and_corrupt_entries(tmp_path):
    cache = ResultCache(tmp_path)
    job = JobSpec(command="cable-s2", n=2, params={"base": "slice", "k": 1})
    cache.store(job, ResultRecord(object="other", input_hash="0" * 64))
    assert cache.lookup(job) is None
    cache.path_for(job).write_text("{not json", encoding="utf-8")
    assert cache.lookup(job) is None


def test_cable_s2_command(capsys):
    assert run(["--no-cache", "cable-s2", "--base", "amphicheiral", "--k", "0"]) == 0
    record = output(capsys)
    assert record["s"] == 0
    assert record["N"] == 2
    assert record["holds"] is True


def test_cached_output_is_byte_identical(tmp_path, capsys):
    argv = ["--cache-dir", str(tmp_path), "cable-s2", "--base", "slice", "--k", "3"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert json.loads(first)["s"] == 6
    assert len(list(tmp_path.glob("*/*.json"))) == 1
    assert run(argv) == 0
    assert capsys.readouterr().out == first


def test_corrupt_cache_entry_is_recomputed(tmp_path, capsys):
    argv = ["--cache-dir", str(tmp_path), "cable-s2", "--base", "slice", "--k", "1"]
    run(argv)
    first = capsys.readouterr().out
    entry = next(tmp_path.glob("*/*.json"))
    entry.write_text("garbage", encoding="utf-8")
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert entry.read_text(encoding="utf-8") == first.rstrip("\n")


def test_invalid_rank_exits_2(capsys):
    assert run(["--no-cache", "homology", "--link", "torus:2:3", "--N", "1"]) == 2
    assert capsys.readouterr().out == ""


def test_invalid_link_exits_2():
    assert run(["--no-cache", "homology", "--link", "torus:3:3", "--N", "2"]) == 2


def test_size_guard_exits_3():
    assert run(["--no-cache", "--max-rows", "1", "homology", "--link", "torus:2:3", "--N", "2"]) == 3


def test_homology_csv(capsys):
    assert run(["--no-cache", "homology", "--link", "torus:2:2", "--N", "2", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,q,rank"
    assert sum(int(line.split(",")[2]) for line in lines[1:]) == 4


def test_homology_from_diagram_file(diagram_file, capsys):
    path = diagram_file(HOPF, "hopf.txt")
    assert run(["--no-cache", "homology", "--graph", str(path), "--N", "2"]) == 0
    record = output(capsys)
    assert record["object"] == "hopf"
    assert sum(term["rank"] for term in record["poincare"]) == 4


def test_missing_diagram_file_exits_2(tmp_path):
    assert run(["--no-cache", "homology", "--graph", str(tmp_path / "none.txt"), "--N", "2"]) == 2


def test_undecodable_diagram_file_exits_2(tmp_path, capsys):
    path = tmp_path / "binary.txt"
    path.write_bytes(b"\xff\xfe\x00bad")
    assert run(["--no-cache", "states", "--graph", str(path), "--N", "2"]) == 2
    assert run(["--no-cache", "homology", "--graph", str(path), "--N", "2"]) == 2
    assert capsys.readouterr().out == ""


def test_rasmussen_recursion(capsys):
    assert run(["--no-cache", "rasmussen", "--torus", "2", "5", "--N", "3", "--method", "recursion"]) == 0
    record = output(capsys)
    assert record["s"] == 8
    assert record["object"] == "T(2,5)"


def test_rasmussen_two_strands_only():
    assert run(["--no-cache", "rasmussen", "--torus", "3", "5", "--N", "2"]) == 2


def test_states_command(diagram_file, capsys):
    assert run(["--no-cache", "states", "--graph", str(diagram_file(HOPF)), "--N", "2"]) == 0
    record = output(capsys)
    assert record["certificates"][0] == "4 states"
    assert len(record["certificates"]) == 5


def test_verify_command(capsys):
    assert run(["--no-cache", "verify", "gornik", "--N", "2"]) == 0
    record = output(capsys)
    assert record["holds"] is True
    assert any("T(2,3), N=2: 2 states" in c for c in record["certificates"])


@pytest.mark.slow
def test_table_command(capsys):
    assert run(["--no-cache", "table", "--N-max", "3", "--k-max", "1"]) == 0
    assert output(capsys)["certificates"] == ["N=2 k=1 s_N=2 (N-1)s_2=2", "N=3 k=1 s_N=4 (N-1)s_2=4"]


def test_rasmussen_pipeline(capsys):
    assert run(["--no-cache", "rasmussen", "--torus", "2", "3", "--N", "2"]) == 0
    record = output(capsys)
    assert record["s"] == 2
    assert record["certificates"][0].startswith("pipeline: ")


@pytest.mark.slow
def test_verify_twist_closures(capsys):
    assert run(["--no-cache", "verify", "theorem1", "--k", "1", "--N", "2"]) == 0
    assert output(capsys)["holds"] is True


def test_concurrent_cache_writes(tmp_path):
    cache = ResultCache(tmp_path)
    job = JobSpec(command="cable-s2", n=2, params={"base": "slice", "k": 2})
    record = ResultRecord(object="slice_(2,5)", N=2, s=4, input_hash=job.key())
    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(lambda _: cache.store(job, record), range(32)))
    assert cache.lookup(job) == record
    assert [p.name for p in cache.path_for(job).parent.iterdir()] == [f"{job.key()}.json"]
