"""View-only rendering: bounded, format-transformed fragments of protected content.

A view never hands out raw bytes. Content is decoded, split into pages of
numbered lines and topped with a page banner, so even the concatenation of
every fragment differs from the stored file. A ViewSession meters the total
bytes served so a crawler cannot reassemble a dataset one page at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_LINES_PER_PAGE = 40
DEFAULT_SESSION_BYTE_CAP = 256 * 1024


class PageOutOfRange(Exception):
    def __init__(self, page: int, total_pages: int):
        super().__init__(f"page {page} out of range (0..{total_pages - 1})")
        self.page = page
        self.total_pages = total_pages


class ViewBudgetExceeded(Exception):
    def __init__(self, cap: int):
        super().__init__(f"view session byte budget of {cap} exhausted")
        self.cap = cap


@dataclass(frozen=True)
class ViewFragment:
    page: int
    total_pages: int
    content: str

    def to_json(self) -> dict:
        return {"page": self.page, "total_pages": self.total_pages, "content": self.content}


def render_view(
    plaintext: bytes, page: int, *, lines_per_page: int = DEFAULT_LINES_PER_PAGE
) -> ViewFragment:
    """Render one page of a decrypted payload as numbered text lines."""
    text = plaintext.decode("utf-8", errors="replace")
    lines = text.splitlines()
    total_pages = max(1, -(-len(lines) // lines_per_page))
    if page < 0 or page >= total_pages:
        raise PageOutOfRange(page, total_pages)

    start = page * lines_per_page
    chunk = lines[start : start + lines_per_page]
    rendered = [f"=== page {page + 1} of {total_pages} ==="]
    rendered.extend(f"{start + i + 1:>6} | {line}" for i, line in enumerate(chunk))
    return ViewFragment(page=page, total_pages=total_pages, content="\n".join(rendered) + "\n")


class ViewSession:
    """Serves fragments for one requester/dataset pair under a byte budget."""

    def __init__(
        self,
        plaintext: bytes,
        *,
        lines_per_page: int = DEFAULT_LINES_PER_PAGE,
        byte_cap: int = DEFAULT_SESSION_BYTE_CAP,
    ):
        self._plaintext = plaintext
        self._lines_per_page = lines_per_page
        self._byte_cap = byte_cap
        self._served = 0

    @property
    def bytes_served(self) -> int:
        return self._served

    @property
    def bytes_remaining(self) -> int:
        return max(0, self._byte_cap - self._served)

    def page(self, page: int) -> ViewFragment:
        fragment = render_view(self._plaintext, page, lines_per_page=self._lines_per_page)
        cost = len(fragment.content.encode("utf-8"))
        if self._served + cost > self._byte_cap:
            raise ViewBudgetExceeded(self._byte_cap)
        self._served += cost
        return fragment
