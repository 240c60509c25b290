from pathlib import Path
from typing import Optional, Union

from kj_logger import get_logger

from ..errors import InputError

logger = get_logger(__name__)


def get_directory(directory: Union[str, Path]) -> Optional[Path]:
    """
    Creates a folder at the specified path if it doesn't exist and returns the Path object.

    Args:
        directory (Union[str, Path]): The path to the folder.

    Returns:
        Optional[Path]: The folder, or None if it could not be created.
    """
    try:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        logger.critical(f"Failed to find or create folder, error: {e}")
        return None
    return directory


def read_text_file(path: Union[str, Path]) -> str:
    """
    Reads an input file as UTF-8 text.

    Raises:
        InputError: If the file is missing or unreadable.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise InputError(f"Input file not found: {path}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"Cannot read input file {path}: {e}") from e
    logger.debug(f"Read {len(text)} characters from {path}")
    return text


def write_text_file(path: Union[str, Path], text: str) -> Path:
    """
    Writes text to `path`, creating parent folders.

    Raises:
        InputError: If the parent folder cannot be created.
    """
    path = Path(path)
    if get_directory(path.parent) is None:
        raise InputError(f"Cannot create output folder for {path}")
    path.write_text(text, encoding="utf-8")
    logger.info(f"Report written to {path}")
    return path
