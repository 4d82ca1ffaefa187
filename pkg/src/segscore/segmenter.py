"""Page segmentation: block structure first, text density as tie-breaker.

A page's body is cut into segments in four steps: every maximal
block-tag subtree under the body becomes a candidate (text between
blocks is grouped into candidates of its own, so nothing is lost);
oversized candidates whose block children differ enough in text density
are recursively re-partitioned; undersized candidates are merged into
their predecessor; whatever remains becomes the segment list, covering
every visible text node exactly once.

Inline wrappers that contain block elements (for example a link around
a card ``<a><div>…</div></a>``) are descended through so the inner
blocks become candidates; the wrapper's own link or visual span is then
not attributed to any segment, though its text always is.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from hashlib import blake2b
from pathlib import Path
from urllib.parse import urlsplit

from .dom import RAW_TEXT_TAGS, DomNode, body_of, visible_text
from .errors import EmptyPage
from .terms import TermVector, tokenize

__all__ = [
    "DEFAULT_BLOCK_TAGS",
    "DEFAULT_VISUAL_TAGS",
    "LINE_WIDTH",
    "SegmentationConfig",
    "Segment",
    "text_density",
    "token_fingerprint",
    "segment_page",
    "segments_to_json",
]

DEFAULT_BLOCK_TAGS = frozenset({
    "div", "p", "section", "article", "aside", "nav", "header", "footer",
    "ul", "ol", "table", "blockquote", "h1", "h2", "h3", "h4", "h5", "h6",
    "pre",
})

# Tags whose subtree tokens are recorded as visual spans when no explicit
# set is configured; kept equal to the default visual markup weight table.
DEFAULT_VISUAL_TAGS = frozenset({
    "h1", "h2", "h3", "h4", "h5", "h6", "strong", "b", "em", "i", "u",
})

LINE_WIDTH = 80  # fixed wrap width behind the density denominator


@dataclass(frozen=True)
class SegmentationConfig:
    """Knobs for the partition rules; defaults hold for ordinary pages."""

    block_tags: frozenset[str] = DEFAULT_BLOCK_TAGS
    min_tokens: int = 10
    max_tokens: int = 400
    density_floor: float = 2.0
    # None means "track the visual markup weight table in use".
    visual_tags: frozenset[str] | None = None

    def __post_init__(self) -> None:
        if not self.block_tags:
            raise ValueError("block_tags must not be empty")
        if self.min_tokens < 1:
            raise ValueError("min_tokens must be >= 1")
        if self.max_tokens <= self.min_tokens:
            raise ValueError("max_tokens must exceed min_tokens")
        if self.density_floor < 0:
            raise ValueError("density_floor must be >= 0")

    @classmethod
    def from_file(cls, path: str | Path) -> "SegmentationConfig":
        """Load overrides from a flat JSON object; absent keys keep defaults."""
        data = json.loads(Path(path).read_text("utf-8"))
        if not isinstance(data, dict):
            raise ValueError(f"{path}: segmentation config must be a JSON object")
        kwargs: dict = {}
        if "block_tags" in data:
            kwargs["block_tags"] = frozenset(data["block_tags"])
        if "visual_tags" in data:
            kwargs["visual_tags"] = frozenset(data["visual_tags"])
        for key in ("min_tokens", "max_tokens", "density_floor"):
            if key in data:
                kwargs[key] = data[key]
        return cls(**kwargs)


@dataclass
class Segment:
    """One scored unit of a page.

    ``tokens`` always equals ``tokenize(text)``; ``links`` holds
    (anchor_tokens, href_tokens) pairs, ``images`` holds
    (alt_tokens, title_tokens, src_filename_tokens) triples and
    ``visual_spans`` holds (tag, subtree_tokens) pairs, all in document
    order.  ``dom_path`` is the root-to-subtree child index path of the
    segment's first node; ``node_paths`` lists the paths of every
    constituent top node (merged segments have several).
    """

    id: int
    dom_path: tuple[int, ...]
    text: str
    tokens: TermVector
    links: list[tuple[TermVector, TermVector]] = field(default_factory=list)
    images: list[tuple[TermVector, TermVector, TermVector]] = field(default_factory=list)
    visual_spans: list[tuple[str, TermVector]] = field(default_factory=list)
    fingerprint: int = 0
    node_paths: tuple[tuple[int, ...], ...] = ()


# ── density and fingerprints ────────────────────────────────────────


def _density_of(text: str) -> float:
    tokens = tokenize(text)
    if not tokens:
        return 0.0
    chars = len(" ".join(text.split()))
    lines = max(1, math.ceil(chars / LINE_WIDTH))
    return len(tokens) / lines


def text_density(node: DomNode) -> float:
    """Tokens per 80-character wrap line of the subtree's visible text."""
    return _density_of(visible_text(node))


def token_fingerprint(tokens: TermVector) -> int:
    """Stable unsigned 64-bit hash of an ordered token list.

    Independent of process and PYTHONHASHSEED; equal token lists always
    collide and the separator byte cannot occur inside a token.
    """
    h = blake2b(digest_size=8)
    for tok in tokens:
        h.update(tok.encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


# ── candidate collection ────────────────────────────────────────────


@dataclass
class _Candidate:
    nodes: list[tuple[tuple[int, ...], DomNode]]
    is_block: bool


def _contains_block(elem: DomNode, block_tags: frozenset[str]) -> bool:
    stack = list(elem.children)
    while stack:
        node = stack.pop()
        if node.is_text:
            continue
        if node.tag in block_tags:
            return True
        if node.tag not in RAW_TEXT_TAGS:
            stack.extend(node.children)
    return False


def _iter_units(elem: DomNode, path: tuple[int, ...], block_tags: frozenset[str]):
    """Yield ("block"|"loose", path, node) over elem's content in document order.

    Non-block wrappers that contain block descendants are descended
    through; everything else is yielded as a loose unit.
    """
    stack = [(elem, path, 0)]
    while stack:
        parent, ppath, i = stack.pop()
        while i < len(parent.children):
            child = parent.children[i]
            cpath = ppath + (i,)
            i += 1
            if not child.is_text and child.tag in block_tags:
                yield ("block", cpath, child)
            elif (
                not child.is_text
                and child.tag not in RAW_TEXT_TAGS
                and _contains_block(child, block_tags)
            ):
                stack.append((parent, ppath, i))
                stack.append((child, cpath, 0))
                break
            else:
                yield ("loose", cpath, child)


def _run_matters(run: list[tuple[tuple[int, ...], DomNode]]) -> bool:
    # pure inter-block whitespace is dropped; anything else is kept
    for _, node in run:
        if not node.is_text or node.text.strip():
            return True
    return False


def _group_candidates(
    elem: DomNode, path: tuple[int, ...], block_tags: frozenset[str]
) -> list[_Candidate]:
    cands: list[_Candidate] = []
    run: list[tuple[tuple[int, ...], DomNode]] = []

    def flush() -> None:
        if run and _run_matters(run):
            cands.append(_Candidate(list(run), is_block=False))
        run.clear()

    for kind, cpath, node in _iter_units(elem, path, block_tags):
        if kind == "block":
            flush()
            cands.append(_Candidate([(cpath, node)], is_block=True))
        else:
            run.append((cpath, node))
    flush()
    return cands


def _subtree_texts(node: DomNode, out: list[str]) -> None:
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.is_text:
            out.append(cur.text)
        elif cur.tag not in RAW_TEXT_TAGS:
            stack.extend(reversed(cur.children))


def _cand_text(cand: _Candidate) -> str:
    pieces: list[str] = []
    for _, node in cand.nodes:
        _subtree_texts(node, pieces)
    return "\n".join(pieces)


# ── partition rules ─────────────────────────────────────────────────


def _split(cand: _Candidate, cfg: SegmentationConfig) -> list[_Candidate] | None:
    """Sub-candidates when the recursion rule fires, else None."""
    if not cand.is_block:
        return None
    path, elem = cand.nodes[0]
    if len(tokenize(_cand_text(cand))) <= cfg.max_tokens:
        return None
    subs = _group_candidates(elem, path, cfg.block_tags)
    if len(subs) < 2 or not any(s.is_block for s in subs):
        return None
    densities = [_density_of(_cand_text(s)) for s in subs]
    if max(densities) - min(densities) <= cfg.density_floor:
        return None  # uniform density: keep long candidates whole
    return subs


def _partitioned(cands: list[_Candidate], cfg: SegmentationConfig) -> list[_Candidate]:
    out: list[_Candidate] = []
    stack = list(reversed(cands))
    while stack:
        cand = stack.pop()
        subs = _split(cand, cfg)
        if subs is None:
            out.append(cand)
        else:
            stack.extend(reversed(subs))
    return out


# ── segment construction ────────────────────────────────────────────


def _href_tokens(href: str) -> TermVector:
    try:
        parts = urlsplit(href)
    except ValueError:
        return tokenize(href)
    return tokenize(parts.path + " " + parts.query)


def _src_filename_tokens(src: str) -> TermVector:
    try:
        path = urlsplit(src).path
    except ValueError:
        path = src
    return tokenize(path.rsplit("/", 1)[-1])


def _collect_features(
    node: DomNode,
    links: list,
    images: list,
    spans: list,
    visual_tags: frozenset[str],
) -> None:
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.is_text or cur.tag in RAW_TEXT_TAGS:
            continue
        if cur.tag == "a":
            links.append((tokenize(visible_text(cur)), _href_tokens(cur.attrs.get("href", ""))))
        if cur.tag == "img":
            images.append((
                tokenize(cur.attrs.get("alt", "")),
                tokenize(cur.attrs.get("title", "")),
                _src_filename_tokens(cur.attrs.get("src", "")),
            ))
        if cur.tag in visual_tags:
            spans.append((cur.tag, tokenize(visible_text(cur))))
        stack.extend(reversed(cur.children))


def _build_segment(
    seg_id: int,
    nodes: list[tuple[tuple[int, ...], DomNode]],
    visual_tags: frozenset[str],
) -> Segment:
    pieces: list[str] = []
    links: list[tuple[TermVector, TermVector]] = []
    images: list[tuple[TermVector, TermVector, TermVector]] = []
    spans: list[tuple[str, TermVector]] = []
    for _, node in nodes:
        _subtree_texts(node, pieces)
        _collect_features(node, links, images, spans, visual_tags)
    text = "\n".join(pieces)
    tokens = tokenize(text)
    return Segment(
        id=seg_id,
        dom_path=nodes[0][0],
        text=text,
        tokens=tokens,
        links=links,
        images=images,
        visual_spans=spans,
        fingerprint=token_fingerprint(tokens),
        node_paths=tuple(path for path, _ in nodes),
    )


def segment_page(dom: DomNode, cfg: SegmentationConfig | None = None) -> list[Segment]:
    """Partition a parsed page into segments.

    Every visible text node under the body lands in exactly one segment,
    in document order.  Raises EmptyPage when the body has no visible
    text at all.
    """
    cfg = cfg or SegmentationConfig()
    body = body_of(dom)
    if not visible_text(body).strip():
        raise EmptyPage("page body has no visible text")
    bpath: tuple[int, ...] = () if body is dom else (dom.children.index(body),)

    flat = _partitioned(_group_candidates(body, bpath, cfg.block_tags), cfg)

    groups: list[list[tuple[tuple[int, ...], DomNode]]] = []
    for cand in flat:
        if groups and len(tokenize(_cand_text(cand))) < cfg.min_tokens:
            groups[-1].extend(cand.nodes)  # short candidate joins its predecessor
        else:
            groups.append(list(cand.nodes))

    visual = cfg.visual_tags if cfg.visual_tags is not None else DEFAULT_VISUAL_TAGS
    return [_build_segment(i, nodes, visual) for i, nodes in enumerate(groups)]


def segments_to_json(url: str, segments: list[Segment]) -> dict:
    """Serializable segment pool; fingerprints go out as decimal strings."""
    return {
        "v": 1,
        "url": url,
        "segments": [
            {
                "id": seg.id,
                "dom_path": list(seg.dom_path),
                "text": seg.text,
                "tokens": list(seg.tokens),
                "links": [[list(a), list(h)] for a, h in seg.links],
                "images": [[list(a), list(t), list(s)] for a, t, s in seg.images],
                "visual_spans": [[tag, list(toks)] for tag, toks in seg.visual_spans],
                "fingerprint": str(seg.fingerprint),
            }
            for seg in segments
        ],
    }
