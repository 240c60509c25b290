from kj_logger import get_logger

logger = get_logger(__name__)
