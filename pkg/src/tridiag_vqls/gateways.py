from pathlib import Path
from typing import Union

import structlog

logger = structlog.get_logger()

PathLike = Union[str, Path]


class ArtifactGateway:
    """A thin gateway for the filesystem operations behind run artifacts."""

    def __init__(self, encoding: str = "utf-8"):
        """Initialize the artifact gateway.

        Args:
            encoding (str, optional): Text encoding for reads and writes. Defaults to "utf-8".
        """
        self._encoding = encoding

    def ensure_directory(self, path: PathLike) -> Path:
        """Create a directory and its parents if they do not exist.

        Args:
            path (PathLike): The directory to create.

        Returns:
            Path: The directory.

        Raises:
            OSError: If the directory cannot be created.
        """
        directory = Path(path)
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def write_text(self, path: PathLike, text: str) -> None:
        """Replace a file's contents with text, using ``\\n`` line endings on every platform.

        Args:
            path (PathLike): The file to write.
            text (str): The contents.

        Raises:
            OSError: If the file cannot be written.
        """
        with open(path, "w", encoding=self._encoding, newline="\n") as handle:
            handle.write(text)
        logger.debug("Artifact written", path=str(path), size=len(text))

    def read_text(self, path: PathLike) -> str:
        """Read a whole text file.

        Args:
            path (PathLike): The file to read.

        Returns:
            str: The contents.

        Raises:
            OSError: If the file cannot be read.
        """
        with open(path, encoding=self._encoding) as handle:
            return handle.read()
