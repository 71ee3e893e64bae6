import pytest

from nlcencode.cli import main
from nlcencode.generate import gen_unstable_chain
from nlcencode.sktree import format_nlc, generate_graph, parse_graph, parse_nlc


@pytest.fixture
def tree_file(tmp_path):
    path = tmp_path / "t.nlc"
    assert main(["gen", "--k", "2", "--seed", "4", "--nodes", "12", "--vertices", "14", "-o", str(path)]) == 0
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_is_deterministic(tmp_path, tree_file):
    again = tmp_path / "again.nlc"
    main(["gen", "--k", "2", "--seed", "4", "--nodes", "12", "--vertices", "14", "-o", str(again)])
    assert again.read_text() == tree_file.read_text()
    assert len(parse_nlc(tree_file.read_text()).attach) == 14


def test_eval_matches_library(capsys, tree_file):
    code, out, _ = run(capsys, "eval", "-i", tree_file)
    assert code == 0
    assert parse_graph(out) == generate_graph(parse_nlc(tree_file.read_text()))


def test_encode_decode_pipeline(capsys, tmp_path, tree_file):
    jfile = tmp_path / "j.txt"
    assert main(["encode", "-i", str(tree_file), "-o", str(jfile)]) == 0
    code, out, _ = run(capsys, "decode", "-i", jfile)
    assert code == 0
    assert parse_graph(out) == generate_graph(parse_nlc(tree_file.read_text()))
    code, out, _ = run(capsys, "decode", "-i", jfile, "--trace", 12, 13)
    assert code == 0 and out.splitlines()[-1].startswith("adjacent 12 13 ")
    assert out.startswith("level=")


def test_roundtrip_factorize_verify(capsys, tree_file):
    code, out, _ = run(capsys, "roundtrip", "-i", tree_file)
    assert code == 0 and "mismatches=0" in out
    code, out, _ = run(capsys, "factorize", "-i", tree_file)
    assert code == 0 and out.startswith("factor 0 level=") and "# depth" in out
    code, out, _ = run(capsys, "verify", "-i", tree_file)
    assert code == 0 and "SReach (aggregate)" in out


def test_ladder_and_chi(capsys, tmp_path):
    path = tmp_path / "hg.nlc"
    path.write_text(format_nlc(gen_unstable_chain(4)))
    code, out, _ = run(capsys, "ladder", "-i", path, "--cap", 6)
    assert (code, out) == (0, "ladder 4\n")
    code, out, _ = run(capsys, "ladder", "-i", path, "--cap", 3)
    assert out == "ladder 3 truncated\n"
    gfile = tmp_path / "g.txt"
    main(["eval", "-i", str(path), "-o", str(gfile)])
    code, out, _ = run(capsys, "chi", "-i", gfile)
    assert code == 0 and out.splitlines()[:2] == ["omega 2", "chi_upper 2"]


def test_gen_halfgraph(capsys):
    code, out, _ = run(capsys, "gen-halfgraph", "--n", 3)
    assert code == 0 and len(parse_nlc(out).attach) == 6
    code, out, _ = run(capsys, "gen-halfgraph", "--n", 3, "--chain")
    assert code == 0 and len(parse_nlc(out).tree) == 8


def test_pipeline_and_corpus(capsys, tmp_path):
    jfile = tmp_path / "j.txt"
    code, out, _ = run(capsys, "pipeline", "--seed", 1, "--structure", jfile)
    assert code == 0 and "roundtrip=ok" in out and jfile.read_text().startswith("jstar ")
    code, out, _ = run(capsys, "corpus", "--n", 3, "--seed", 5, "--budget", 2000)
    assert code == 0 and out.splitlines()[-1] == "instances=3 failures=0"


def test_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, "eval", "-i", tmp_path / "missing.nlc")
    assert code == 4 and err.startswith("error:")
    bad = tmp_path / "bad.nlc"
    bad.write_text("nlc k=2\nnode 0 parent=7\n")
    code, _, err = run(capsys, "eval", "-i", bad)
    assert code == 2 and "line 2" in err
    code, _, _ = run(capsys, "gen", "--k", 0)
    assert code == 2
    code, _, _ = run(capsys, "chi", "-i", bad)
    assert code == 2


def test_corrupt_structure_exits_3(capsys, tmp_path, tree_file):
    jfile = tmp_path / "j.txt"
    main(["encode", "-i", str(tree_file), "-o", str(jfile)])
    jfile.write_text("\n".join(ln for ln in jfile.read_text().splitlines() if not ln.startswith("eta1")))
    code, _, err = run(capsys, "decode", "-i", jfile)
    assert code == 3 and err.startswith("failed:")


def test_no_color_when_piped(capsys, monkeypatch, tree_file):
    monkeypatch.delenv("NO_COLOR", raising=False)
    _, out, _ = run(capsys, "roundtrip", "-i", tree_file)
    assert "\033[" not in out


def test_usage_errors():
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["ladder", "--cap", "x"])
