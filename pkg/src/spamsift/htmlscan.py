"""Tolerant, event-based HTML scanning helpers.

Built on html.parser so malformed markup degrades gracefully. No DOM is
constructed; each helper makes one linear pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from html.parser import HTMLParser

_SKIP_TEXT_TAGS = {"script", "style"}


@dataclass
class Element:
    tag: str
    attrs: dict[str, str]
    _text_parts: list[str] = field(default_factory=list)

    @property
    def inner_text(self) -> str:
        return "".join(self._text_parts)


class _ElementScanner(HTMLParser):
    """Collects every element with its attributes and raw inner text.

    End tags close the nearest open element of the same name; anything
    left open when the document ends is closed implicitly.
    """

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.elements: list[Element] = []
        self._open: list[Element] = []

    def handle_starttag(self, tag, attrs):
        element = Element(tag=tag, attrs={k: (v or "") for k, v in attrs})
        self.elements.append(element)
        self._open.append(element)

    def handle_startendtag(self, tag, attrs):
        self.elements.append(Element(tag=tag, attrs={k: (v or "") for k, v in attrs}))

    def handle_endtag(self, tag):
        for i in range(len(self._open) - 1, -1, -1):
            if self._open[i].tag == tag:
                del self._open[i:]
                return
        # stray close tag: ignore

    def handle_data(self, data):
        if any(e.tag in _SKIP_TEXT_TAGS for e in self._open):
            return
        for element in self._open:
            element._text_parts.append(data)


def scan_elements(html: str) -> list[Element]:
    """All elements in document order; never raises on bad markup."""
    scanner = _ElementScanner()
    try:
        scanner.feed(html)
        scanner.close()
    except Exception:
        pass
    return scanner.elements


class _TextCollector(HTMLParser):
    """Accumulates character data twice: for the whole document and for
    the region inside <body>, skipping script/style content."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.all_parts: list[str] = []
        self.body_parts: list[str] = []
        self.saw_body = False
        self._body_depth = 0
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag == "body":
            self.saw_body = True
            self._body_depth += 1
        elif tag in _SKIP_TEXT_TAGS:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag == "body" and self._body_depth > 0:
            self._body_depth -= 1
        elif tag in _SKIP_TEXT_TAGS and self._skip_depth > 0:
            self._skip_depth -= 1

    def handle_data(self, data):
        if self._skip_depth > 0:
            return
        self.all_parts.append(data)
        if self._body_depth > 0:
            self.body_parts.append(data)


def document_text(html: str) -> tuple[str, str, bool]:
    """Returns (body text, whole-document text, whether a body tag was seen)."""
    collector = _TextCollector()
    try:
        collector.feed(html)
        collector.close()
    except Exception:
        pass
    return "".join(collector.body_parts), "".join(collector.all_parts), collector.saw_body


class _AnchorCollector(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.hrefs: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            for name, value in attrs:
                if name == "href" and value is not None:
                    self.hrefs.append(value)
                    break


def anchor_hrefs(html: str) -> list[str]:
    """href values of all anchors, in document order."""
    collector = _AnchorCollector()
    try:
        collector.feed(html)
        collector.close()
    except Exception:
        pass
    return collector.hrefs
