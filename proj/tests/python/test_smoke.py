import os
import pathlib
import random

import pytest

import dairstega as ds

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "data" / "corpus.txt"


@pytest.fixture(scope="module")
def model():
    return ds.NGramModel.train_file(str(CORPUS), order=2, smoothing=1e-10)


def test_frame_roundtrip():
    bits = ds.frame(b"Love and peace")
    assert len(bits) == ds.FRAME_HEADER_BITS + 112
    assert bits.startswith("11011010" + "00000001")
    assert ds.deframe(bits) == b"Love and peace"


def test_distribution_sums_to_grid(model):
    row = model.next_distribution(model.tokenize("fox meets"))
    assert sum(row) == ds.GRID_UNITS
    assert model.tokens[:2] == ["<EOS>", "<UNK>"]


def test_embed_extract(model):
    spec = ds.AllocationSpec("condensed", alpha=8, beta=0.5)
    cfg = ds.CodecConfig(model, spec=spec, top_k=16, instruction="fox meets")
    doc = ds.embed(model, cfg, b"Love and peace")
    assert doc.embedded_bits == 48 + 112
    assert ds.extract(model, cfg, doc) == b"Love and peace"
    again = ds.StegoDocument.from_json(doc.to_json())
    assert again.token_ids == doc.token_ids
    assert ds.reveal(model, cfg, doc.text) == b"Love and peace"


def test_hide_reveal_random(model):
    rng = random.Random(3)
    for kind in ("linear", "sqrt", "exp", "log", "condensed"):
        secret = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
        doc, cfg = ds.hide(model, secret, kind=kind, alpha=32, top_k=8, instruction="fox meets")
        assert ds.reveal(model, cfg, doc) == secret


def test_baselines(model):
    cfg = ds.CodecConfig(model, top_k=4, instruction="fox meets")
    doc = ds.embed_flc(model, cfg, 2, b"flc")
    assert ds.extract_flc(model, cfg, 2, doc) == b"flc"
    doc = ds.embed_hc(model, cfg, b"hc")
    assert ds.extract_hc(model, cfg, doc) == b"hc"


def test_allocation_helpers():
    assert ds.apportion([1000, 1, 1], 8) == [6, 1, 1]
    ranges = ds.allocate([5, 3, 2], ds.AllocationSpec("linear", alpha=3))
    assert [r["begin"] for r in ranges] == [0, 4, 6]
    assert ranges[-1]["end"] == 7
    assert ds.common_prefix(0b0100, 0b0111, 4) == "01"
    report = ds.validate_constraints(ds.AllocationSpec("condensed", beta=0.5))
    assert report["constraint2"]["pass"] is True
    assert report["constraint3"]["derivative_clause"]["pass"] is False


def test_metrics(model):
    u = [0.2, 0.3, 0.5]
    assert ds.cosine_similarity(u, u) == pytest.approx(100.0)
    assert ds.jsd([1, 0], [0, 1]) == 100.0
    assert ds.manhattan([1, 0], [0, 1]) == 2.0
    ids = model.tokenize("fox meets owl")
    assert ds.perplexity(model, [], ids) >= 1.0


def test_errors_carry_codes(model):
    spec = ds.AllocationSpec()
    cfg = ds.CodecConfig(model, spec=spec, top_k=16, instruction="fox meets", max_tokens=2)
    with pytest.raises(ds.DairstegaError) as info:
        ds.embed(model, cfg, b"x" * 100)
    assert info.value.code == "CapacityExhausted"
    with pytest.raises(ds.DairstegaError):
        ds.AllocationSpec("cubic")


def test_spec_accepts_enum_kind(model):
    spec = ds.AllocationSpec(ds.AllocationKind.CONDENSED, alpha=8, beta=0.5)
    assert spec.kind == ds.AllocationKind.CONDENSED
    doc, cfg = ds.hide(model, "Love and peace", kind=ds.AllocationKind.CONDENSED,
                       alpha=8, beta=0.5, top_k=16, instruction="fox meets")
    assert ds.reveal(model, cfg, doc.text) == b"Love and peace"
