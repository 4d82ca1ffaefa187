"""Seeded random HTML document generator for partition fuzzing.

Documents mix block elements, nested wrappers, loose body text, inline
markup, links, images, scripts, comments and mild tag soup.  Every
document has at least one visible body token.
"""

from __future__ import annotations

import random

VOCAB = [
    "web", "search", "engines", "semantic", "ranking", "python", "page",
    "index", "crawl", "term", "score", "data", "link", "note", "alpha",
    "beta", "gamma", "delta", "zone", "run",
]

_BLOCK_TAGS = ["div", "p", "section", "article", "blockquote", "ul", "pre"]
_INLINE_TAGS = ["strong", "em", "b", "i", "u", "span", "code"]


def _words(rng: random.Random, lo: int = 1, hi: int = 14) -> str:
    return " ".join(rng.choice(VOCAB) for _ in range(rng.randint(lo, hi)))


def _inline(rng: random.Random) -> str:
    tag = rng.choice(_INLINE_TAGS)
    return f"<{tag}>{_words(rng, 1, 4)}</{tag}>"


def _leaf_block(rng: random.Random) -> str:
    tag = rng.choice(_BLOCK_TAGS)
    parts = [_words(rng)]
    if rng.random() < 0.4:
        parts.append(_inline(rng))
    if rng.random() < 0.3:
        parts.append(f'<a href="/{rng.choice(VOCAB)}/{rng.choice(VOCAB)}?q={rng.choice(VOCAB)}">{_words(rng, 1, 3)}</a>')
    if rng.random() < 0.2:
        parts.append(f'<img src="/img/{rng.choice(VOCAB)}-{rng.choice(VOCAB)}.png" alt="{_words(rng, 1, 3)}">')
    if rng.random() < 0.3:
        parts.append(_words(rng, 1, 6))
    body = " ".join(parts)
    if tag == "ul":
        items = "".join(f"<li>{_words(rng, 1, 5)}</li>" for _ in range(rng.randint(1, 4)))
        return f"<ul>{items}</ul>"
    if rng.random() < 0.1:
        return f"<{tag}>{body}"  # unclosed block: the parser must recover
    return f"<{tag}>{body}</{tag}>"


def _item(rng: random.Random, depth: int) -> str:
    roll = rng.random()
    if roll < 0.15:
        return _words(rng, 1, 9)  # loose text directly under the parent
    if roll < 0.25:
        return f"<!-- {_words(rng, 1, 5)} -->"
    if roll < 0.32:
        return f"<script>var x = \"{_words(rng, 1, 5)}\";</script>"
    if roll < 0.45 and depth < 3:
        wrapper = rng.choice(["div", "main", "center", "span"])
        inner = "".join(_item(rng, depth + 1) for _ in range(rng.randint(1, 3)))
        return f"<{wrapper}>{inner}</{wrapper}>"
    return _leaf_block(rng)


def random_document(rng: random.Random) -> str:
    title = _words(rng, 1, 4)
    items = [_item(rng, 0) for _ in range(rng.randint(1, 8))]
    items.append(f"<p>{_words(rng, 3, 10)}</p>")  # guarantees visible text
    body = "\n".join(items)
    return (
        f"<html><head><title>{title}</title></head><body>\n{body}\n</body></html>\n"
    )
