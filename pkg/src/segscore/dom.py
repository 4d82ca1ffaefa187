"""Error-tolerant HTML parsing into a minimal DOM.

Built on html.parser with a trimmed set of HTML5 recovery rules: implied
end tags (``<p>a<p>b`` parses as two sibling paragraphs), void elements,
stray end tags ignored, unclosed tags closed at end of input.  The tree
always has the shape ``html > (head, body)``; both are synthesized when
the input omits them, and stray top-level content is moved into the body
the way browsers do it.

Comments, processing instructions and doctypes are dropped entirely, and
script/style content never produces text nodes, so visible text can be
read straight off the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser

from .errors import MalformedInput

__all__ = [
    "DomNode",
    "TEXT_TAG",
    "VOID_TAGS",
    "RAW_TEXT_TAGS",
    "parse_html",
    "iter_nodes",
    "visible_text",
    "body_of",
    "find_first",
    "page_title_tokens",
]

TEXT_TAG = "#text"

VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# Content of these elements never contributes visible text.
RAW_TEXT_TAGS = frozenset({"script", "style"})

_HEADINGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})

# Start tags that implicitly close an open <p> (HTML5 list, trimmed).
_P_CLOSERS = frozenset({
    "address", "article", "aside", "blockquote", "details", "div", "dl",
    "fieldset", "figcaption", "figure", "footer", "form", "header", "hr",
    "main", "menu", "nav", "ol", "p", "pre", "section", "table", "ul",
}) | _HEADINGS

# Start tag -> open tags it implicitly closes (applied to the stack top).
_IMPLIED_CLOSE: dict[str, frozenset[str]] = {
    "li": frozenset({"li"}),
    "dt": frozenset({"dt", "dd"}),
    "dd": frozenset({"dt", "dd"}),
    "tr": frozenset({"tr", "td", "th"}),
    "td": frozenset({"td", "th"}),
    "th": frozenset({"td", "th"}),
    "thead": frozenset({"thead", "tbody", "tfoot", "tr", "td", "th"}),
    "tbody": frozenset({"thead", "tbody", "tfoot", "tr", "td", "th"}),
    "tfoot": frozenset({"thead", "tbody", "tfoot", "tr", "td", "th"}),
    "option": frozenset({"option"}),
    "optgroup": frozenset({"option", "optgroup"}),
    "a": frozenset({"a"}),
}
for _h in _HEADINGS:
    _IMPLIED_CLOSE[_h] = _HEADINGS

# Tags that belong in <head> when they appear before any body content.
_HEAD_ONLY_TAGS = frozenset({"title", "meta", "link", "base", "style"})
_HEAD_ALLOWED = _HEAD_ONLY_TAGS | frozenset({"script", "noscript", "template"})


@dataclass
class DomNode:
    """One element or text node.

    Elements carry ``tag``/``attrs``/``children``; text nodes use the
    sentinel tag ``#text`` and put their content in ``text``.
    """

    tag: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list["DomNode"] = field(default_factory=list)
    text: str = ""

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT_TAG

    def __repr__(self) -> str:  # keep test failures readable
        if self.is_text:
            return f"DomNode(#text {self.text!r})"
        return f"DomNode(<{self.tag}> {len(self.children)} children)"


def _attr_dict(attrs: list[tuple[str, str | None]]) -> dict[str, str]:
    out: dict[str, str] = {}
    for name, value in attrs:
        out.setdefault(name, value if value is not None else "")
    return out


class _TreeBuilder(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.root = DomNode("html")
        self.head = DomNode("head")
        self.body = DomNode("body")
        self.root.children = [self.head, self.body]
        self._stack: list[DomNode] = [self.root]
        self._body_seen = False
        self._raw_depth = 0

    # ── stack plumbing ──────────────────────────────────────────────

    def _top(self) -> DomNode:
        return self._stack[-1]

    def _push(self, node: DomNode) -> None:
        self._stack.append(node)
        if node.tag in RAW_TEXT_TAGS:
            self._raw_depth += 1

    def _pop(self) -> DomNode:
        node = self._stack.pop()
        if node.tag in RAW_TEXT_TAGS:
            self._raw_depth -= 1
        return node

    def _enter_body(self) -> None:
        if self._top() is self.root:
            self._stack.append(self.body)
            self._body_seen = True

    # ── handlers ────────────────────────────────────────────────────

    def handle_starttag(self, tag, attrs):
        if tag == "html":
            for k, v in attrs:
                self.root.attrs.setdefault(k, v or "")
            return
        if tag == "head":
            if self._top() is self.root and not self._body_seen:
                for k, v in attrs:
                    self.head.attrs.setdefault(k, v or "")
                self._stack.append(self.head)
            return
        if tag == "body":
            for k, v in attrs:
                self.body.attrs.setdefault(k, v or "")
            if not self._body_seen:
                while len(self._stack) > 1:
                    self._pop()
                self._stack.append(self.body)
                self._body_seen = True
            return

        # Head-only tags before any body content go into the head, even
        # when the page never opened <head> explicitly.
        if self._top() is self.root and tag in _HEAD_ONLY_TAGS and not self._body_seen:
            node = DomNode(tag, attrs=_attr_dict(attrs))
            self.head.children.append(node)
            if tag not in VOID_TAGS:
                self._stack.append(self.head)
                self._push(node)
            return

        # Body content arriving while <head> is the open element closes
        # the head, browser-style.
        if self._top() is self.head and tag not in _HEAD_ALLOWED:
            self._pop()

        # Implied end tags.
        close = _IMPLIED_CLOSE.get(tag)
        if close:
            while self._top().tag in close:
                self._pop()
        if tag in _P_CLOSERS:
            while self._top().tag == "p":
                self._pop()

        self._enter_body()
        node = DomNode(tag, attrs=_attr_dict(attrs))
        self._top().children.append(node)
        if tag not in VOID_TAGS:
            self._push(node)

    def handle_endtag(self, tag):
        if tag in VOID_TAGS:
            return  # </br> and friends act like their start tag in browsers; drop
        # Close up to the nearest matching open element; a stray end tag
        # with no match anywhere is ignored.
        for i in range(len(self._stack) - 1, 0, -1):
            if self._stack[i].tag == tag:
                while len(self._stack) > i:
                    self._pop()
                return

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)
        if tag not in VOID_TAGS:
            self.handle_endtag(tag)

    def handle_data(self, data):
        if self._raw_depth or not data:
            return
        top = self._top()
        if top is self.root:
            if not data.strip():
                return  # inter-element whitespace outside body
            self._enter_body()
            top = self._top()
        elif top is self.head:
            if not data.strip():
                return
            self._pop()
            self._enter_body()
            top = self._top()
        if top.children and top.children[-1].is_text:
            top.children[-1].text += data
        else:
            top.children.append(DomNode(TEXT_TAG, text=data))

    def handle_comment(self, data):
        pass

    def handle_decl(self, decl):
        pass

    def handle_pi(self, data):
        pass

    def unknown_decl(self, data):
        pass


def parse_html(data: bytes | bytearray | str) -> DomNode:
    """Parse an HTML byte stream (or string) into a DomNode tree.

    Bytes are decoded as UTF-8 with lossy replacement, so arbitrary tag
    soup always yields a tree; raises MalformedInput only when the input
    is not text-like at all.
    """
    if isinstance(data, (bytes, bytearray)):
        text = bytes(data).decode("utf-8-sig", errors="replace")
    elif isinstance(data, str):
        text = data
    else:
        raise MalformedInput(f"expected bytes or str, got {type(data).__name__}")
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    return builder.root


# ── traversal helpers ───────────────────────────────────────────────


def iter_nodes(root: DomNode):
    """Yield root and every descendant in document order (iterative)."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if not node.is_text:
            stack.extend(reversed(node.children))


def visible_text(node: DomNode) -> str:
    """Concatenate the subtree's text nodes in document order.

    Pieces are joined with a newline so that tokens never fuse across
    text-node boundaries; script/style subtrees are skipped.
    """
    parts: list[str] = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.is_text:
            parts.append(cur.text)
        elif cur.tag not in RAW_TEXT_TAGS:
            stack.extend(reversed(cur.children))
    return "\n".join(parts)


def body_of(root: DomNode) -> DomNode:
    """Return the body element of a parsed tree."""
    if root.tag == "body":
        return root
    for child in root.children:
        if child.tag == "body":
            return child
    raise ValueError("tree has no body element")


def find_first(root: DomNode, tag: str) -> DomNode | None:
    for node in iter_nodes(root):
        if node.tag == tag:
            return node
    return None


def page_title_tokens(root: DomNode) -> list[str]:
    """Tokens of the page's <title>, or [] when there is none."""
    from .terms import tokenize

    title = find_first(root, "title")
    return tokenize(visible_text(title)) if title is not None else []
