"""Interval-allocation text steganography over word-level language models.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports it and adds a couple of conveniences.
"""
from ._core import (
    FRAME_HEADER_BITS,
    GRID_UNITS,
    AllocationKind,
    AllocationSpec,
    CodecConfig,
    DairstegaError,
    LanguageModel,
    NGramModel,
    RemoteModel,
    StegoDocument,
    allocate,
    apportion,
    common_prefix,
    compare_corpora,
    cosine_similarity,
    deframe,
    document_from_text,
    dot_product_diff,
    embed,
    embed_flc,
    embed_hc,
    euclidean,
    extract,
    extract_flc,
    extract_hc,
    frame,
    jsd,
    manhattan,
    perplexity,
    validate_constraints,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["hide", "reveal"]


def hide(model, secret, **config):
    """Embeds ``secret`` (bytes or str) with a CodecConfig built from ``config``."""
    if isinstance(secret, str):
        secret = secret.encode()
    spec = config.pop("spec", None) or AllocationSpec(
        **{k: config.pop(k) for k in ("kind", "alpha", "beta", "b") if k in config}
    )
    cfg = CodecConfig(model, spec=spec, **config)
    return embed(model, cfg, secret), cfg


def reveal(model, cfg, doc_or_text):
    """Recovers the secret from a StegoDocument or its bare text."""
    if isinstance(doc_or_text, str):
        doc_or_text = document_from_text(model, doc_or_text, cfg.digest)
    return extract(model, cfg, doc_or_text)
