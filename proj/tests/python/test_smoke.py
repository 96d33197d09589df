"""End-to-end smoke tests for the python surface of the compiled core."""

import math
import random

import pytest

import hadv


def words(n, prefix="w"):
    return [f"{prefix}{i}" for i in range(n)]


def far_text(rng, n):
    return " ".join(f"t{rng.randrange(10**9)}" for _ in range(n))


def test_tokenize():
    assert hadv.tokenize("Gene NLCR inhibits KLK3") == [
        "Gene",
        "NLCR",
        "inhibits",
        "KLK3",
    ]
    assert hadv.tokenize("") == []
    assert hadv.tokenize("  a\tb \n c ") == ["a", "b", "c"]


def test_wer_examples():
    assert hadv.levenshtein(["a", "b", "c"], ["a", "x", "c", "d"]) == 2
    ref = words(11)
    hyp = ref[:7] + ["x1", "x2", "x3", "x4"]
    assert math.isclose(hadv.wer(ref, hyp), 4 / 11, abs_tol=1e-9)
    with pytest.raises(RuntimeError):
        hadv.wer([], ["a"])


def test_threshold_is_strict():
    ref = words(12)
    two = ["x1", "x2"] + ref[2:]
    three = ["x1", "x2", "x3"] + ref[3:]
    assert hadv.within_threshold(ref, two, 0.25)
    assert not hadv.within_threshold(ref, three, 0.25)


def test_kdao_labeling_and_transforms():
    assert hadv.kdao_label("The gene binds this protein via interaction") == "P"
    assert hadv.kdao_label("gene gene gene inhibits") == "N"

    body = " ".join(f"t{i}" for i in range(60))
    positive = hadv.Sample("p1", body + " interact gene protein", "P")
    flipped = hadv.make_adversarial_negative(positive, seed=1)
    assert flipped.label == "N"
    assert hadv.kdao_label(flipped.text) == "N"
    assert flipped.source_id == "p1"

    negative = hadv.Sample("n1", body, "N")
    raised = hadv.make_adversarial_positive(negative, seed=1)
    assert hadv.kdao_label(raised.text) == "P"
    assert len(hadv.tokenize(raised.text)) == 63

    copy = hadv.make_affable(positive, seed=5)
    assert copy.label == "P"
    assert hadv.kdao_label(copy.text) == "P"
    # Same seed, same bytes.
    again = hadv.make_affable(positive, seed=5)
    assert again.text == copy.text


def test_full_report_on_marker_samples():
    rel = [
        ("REL-1", "Gene MARKER-A inhibits MARKER-B and EFGR, but has no effect on MAPK.", "P"),
        ("REL-4", "Gene MARKER-A inhibits KLK3 and MARKER-B, but has no effect on MAPK.", "P"),
        ("REL-2", "Gene MARKER-A inhibits KLK3 and EFGR, but has no effect on MARKER-B.", "N"),
        ("REL-3", "Gene NLCR inhibits MARKER-A and EFGR, but has no effect on MARKER-B.", "N"),
    ]
    dataset = hadv.Dataset.from_samples(
        [hadv.Sample(i, t, l) for i, t, l in rel], "P"
    )
    report = hadv.full_report(dataset, epsilon=0.30)
    assert report["h_adversarial"]["P->N"] == {"n": 2, "rate": 1.0}
    assert report["h_affable"]["P"] == {"n": 1, "rate": 0.5}
    assert report["h_affable"]["N"] == {"n": 1, "rate": 0.5}

    n, rate = hadv.h_adversarial_rate(dataset, "P", "N", 0.30)
    assert (n, rate) == (2, 1.0)


def test_relgen_enumeration():
    a = hadv.AnnotatedText(
        "rel",
        "Gene NLCR inhibits KLK3 and EFGR, but has no effect on MAPK.",
        ["NLCR", "KLK3", "EFGR", "MAPK"],
        [("NLCR", "KLK3")],
    )
    samples = hadv.enumerate_pair_samples(a)
    assert len(samples) == 6
    assert sum(1 for s in samples if s.label == "P") == 1
    assert (
        hadv.insert_markers(a, "NLCR", "KLK3")
        == "Gene MARKER-A inhibits MARKER-B and EFGR, but has no effect on MAPK."
    )
    shuffled = hadv.shuffle_marker_adversarial(a, ("NLCR", "KLK3"), seed=2)
    assert shuffled.label == "N"
    assert shuffled.text in {s.text for s in samples if s.label == "N"}


def test_curation_hits_exact_rates():
    rng = random.Random(0)
    samples = []
    for i in range(60):
        samples.append(
            hadv.Sample(f"p{i}", far_text(rng, 40) + " interact gene protein", "P")
        )
    for i in range(200):
        samples.append(hadv.Sample(f"n{i}", far_text(rng, 40), "N"))
    pool = hadv.Dataset.from_samples(samples, "P")

    dataset, meta = hadv.curate_adversarial(
        pool, size=100, pos_rate=0.25, target=0.2, epsilon=0.25, seed=9
    )
    assert len(dataset) == 100
    assert meta["achieved_rate"] == pytest.approx(0.2)
    assert meta["verification"]["h_adversarial"]["P->N"]["n"] == 5
    assert meta["verification"]["h_affable"]["P"]["n"] == 0

    dataset2, meta2 = hadv.curate_affable(
        pool, size=100, pos_rate=0.25, target=0.2, on_positive=True, seed=9
    )
    assert meta2["verification"]["h_affable"]["P"]["n"] == 5
    assert meta2["verification"]["h_adversarial"]["P->N"]["n"] == 0


def test_round_trip(tmp_path):
    samples = [
        hadv.Sample("a", "one two three", "P"),
        hadv.Sample("b", "four five", "N", source_id="a", transform="affable"),
    ]
    dataset = hadv.Dataset.from_samples(samples, "P")
    path = tmp_path / "d.jsonl"
    hadv.write_dataset(dataset, path)
    back = hadv.load_dataset(path, "jsonl", "P")
    assert back == dataset
    stats = hadv.dataset_stats(back)
    assert stats["size"] == 2
    assert stats["positive_rate"] == pytest.approx(0.5)


def test_standard_error():
    assert hadv.standard_error([1.0, 2.0, 3.0]) == pytest.approx(
        1.0 / math.sqrt(3.0)
    )
    assert hadv.standard_error([5.0, 5.0, 5.0]) == 0.0
    with pytest.raises(RuntimeError):
        hadv.standard_error([1.0])
