import os
import re
from pathlib import Path
from typing import FrozenSet, List, Optional, Sequence

import numpy as np
from bs4 import BeautifulSoup

from ..interfaces.labeled_corpus import LabeledCorpus, NEGATIVE, POSITIVE
from ..utils.error_handler import (
    InsufficientDocuments,
    InvalidParams,
    MalformedLine,
    MissingDirectory,
    MissingFile,
    ParseError,
    UnknownLabel,
    raise_domain_error,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

_OPEN_TAG = re.compile(r"<REUTERS\b", re.IGNORECASE)
_CLOSE_TAG = re.compile(r"</REUTERS\s*>", re.IGNORECASE)


class CorpusRepository:
    """Loads labeled corpora from the supported on-disk layouts."""

    def __init__(self, encoding: str = "utf-8"):
        self.encoding = encoding

    def load_labeled_lines(
        self,
        path,
        positive_label: str,
        negative_label: Optional[str] = None,
        delimiter: str = "\t",
    ) -> LabeledCorpus:
        """Reads `label<TAB>text` lines. Blank lines are ignored."""
        documents: List[str] = []
        labels: List[int] = []
        content = self._decode(self._read_bytes(path), path)
        for line_number, line in enumerate(content.split("\n"), start=1):
            if not line.strip():
                continue
            if delimiter not in line:
                raise_domain_error(
                    MalformedLine,
                    f"{path}:{line_number}: missing delimiter {delimiter!r}",
                    line_number=line_number,
                )
            label, text = line.split(delimiter, 1)
            label = label.strip()
            if label == positive_label:
                labels.append(POSITIVE)
            elif label and (negative_label is None or label == negative_label):
                labels.append(NEGATIVE)
            else:
                raise_domain_error(UnknownLabel, f"{path}:{line_number}: unknown label {label!r}")
            documents.append(text)

        logger.info(f"Loaded {len(documents)} labeled lines from {path}")
        return LabeledCorpus(tuple(documents), tuple(labels), name=Path(path).stem)

    def load_reuters_sgml(self, paths: Sequence, positive_topic: str) -> LabeledCorpus:
        """One document per <REUTERS> element: TITLE then BODY.

        Positive iff `positive_topic` is one of the element's TOPICS
        (case-insensitive exact match). Elements without body text are skipped.
        """
        wanted = positive_topic.strip().lower()
        documents: List[str] = []
        labels: List[int] = []
        skipped = 0

        for path in sorted(str(p) for p in paths):
            # latin-1 maps bytes one to one, so string offsets are byte offsets
            text = self._read_bytes(path).decode("latin-1")

            for start, end in self._element_spans(text, path):
                soup = BeautifulSoup(text[start:end], "html.parser")
                body = soup.find("body")
                body_text = body.get_text(" ", strip=True) if body else ""
                body_text = body_text.replace("\x03", "").strip()
                if not body_text:
                    skipped += 1
                    continue

                title = soup.find("title")
                title_text = title.get_text(" ", strip=True) if title else ""
                topics_tag = soup.find("topics")
                topics = (
                    [d.get_text(strip=True).lower() for d in topics_tag.find_all("d")]
                    if topics_tag else []
                )

                documents.append(f"{title_text}\n{body_text}" if title_text else body_text)
                labels.append(POSITIVE if wanted in topics else NEGATIVE)

        logger.info(
            f"Reuters: {len(documents)} documents accepted, {skipped} skipped without body, "
            f"{sum(labels)} labeled {positive_topic!r}"
        )
        return LabeledCorpus(tuple(documents), tuple(labels), skipped=skipped, name=f"reuters-{wanted}")

    def _element_spans(self, text: str, path: str):
        opens = [m.start() for m in _OPEN_TAG.finditer(text)]
        closes = [m.end() for m in _CLOSE_TAG.finditer(text)]
        if len(closes) > len(opens):
            raise_domain_error(ParseError, f"{path}: unmatched </REUTERS>", offset=closes[len(opens)])

        spans = []
        for i, start in enumerate(opens):
            end = closes[i] if i < len(closes) else None
            next_open = opens[i + 1] if i + 1 < len(opens) else len(text)
            if end is None or end > next_open:
                raise_domain_error(
                    ParseError,
                    f"{path}: <REUTERS> element at byte {start} is not terminated",
                    offset=start,
                )
            spans.append((start, end))
        return spans

    def load_class_dirs(
        self,
        root,
        positive_dir: str,
        negative_sample: Optional[int] = None,
        seed: int = 0,
    ) -> LabeledCorpus:
        """Directory-per-class layout: root/<class>/<docfile>.

        Negatives are all documents outside `positive_dir`, optionally
        downsampled without replacement. A file name already present in the
        positive directory is not counted again as a negative.
        """
        root = Path(root)
        if not root.is_dir():
            raise_domain_error(MissingDirectory, f"Corpus root {root} does not exist")
        positive_path = root / positive_dir
        if not positive_path.is_dir():
            raise_domain_error(MissingDirectory, f"Positive class directory {positive_path} does not exist")

        positive_files = sorted(p for p in positive_path.iterdir() if p.is_file())
        positive_names = {p.name for p in positive_files}

        negative_files = []
        duplicates = 0
        for class_dir in sorted(p for p in root.iterdir() if p.is_dir() and p.name != positive_dir):
            for doc in sorted(p for p in class_dir.iterdir() if p.is_file()):
                if doc.name in positive_names:
                    duplicates += 1
                    continue
                negative_files.append(doc)

        if negative_sample is not None:
            if negative_sample > len(negative_files):
                raise_domain_error(
                    InsufficientDocuments,
                    f"Requested {negative_sample} negatives but only {len(negative_files)} are available",
                )
            rng = np.random.default_rng(seed)
            chosen = np.sort(rng.choice(len(negative_files), size=negative_sample, replace=False))
            negative_files = [negative_files[i] for i in chosen]

        documents = [self._read(p) for p in positive_files] + [self._read(p) for p in negative_files]
        labels = [POSITIVE] * len(positive_files) + [NEGATIVE] * len(negative_files)
        logger.info(
            f"{root}: {len(positive_files)} documents in {positive_dir!r}, "
            f"{len(negative_files)} negatives kept, {duplicates} cross-listed skipped"
        )
        return LabeledCorpus(tuple(documents), tuple(labels), skipped=duplicates, name=f"{root.name}-{positive_dir}")

    def _read(self, path: Path) -> str:
        return self._read_bytes(path).decode(self.encoding, errors="replace")

    def _read_bytes(self, path) -> bytes:
        try:
            with open(path, "rb") as stream:
                return stream.read()
        except OSError as e:
            raise_domain_error(MissingFile, f"Cannot read {path}: {e.strerror or e}")

    def _decode(self, raw: bytes, path) -> str:
        try:
            return raw.decode(self.encoding)
        except UnicodeDecodeError as e:
            raise_domain_error(ParseError, f"{path}: invalid {self.encoding} at byte {e.start}", offset=e.start)


def reuters_files(directory) -> List[str]:
    """The reut2-NNN.sgm files of a Reuters-21578 distribution directory."""
    return sorted(
        os.path.join(directory, name)
        for name in os.listdir(directory)
        if name.lower().endswith(".sgm")
    )


def read_stopwords(path) -> FrozenSet[str]:
    """One word per line; blank lines and `#` comments are ignored."""
    path = Path(path)
    if not path.is_file():
        raise_domain_error(InvalidParams, f"Stopword file {path} does not exist")
    with open(path, "r", encoding="utf-8") as stream:
        words = [line.strip() for line in stream]
    return frozenset(w for w in words if w and not w.startswith("#"))
