"""Logger module"""

import logging
import os
import sys
from pathlib import Path

logger = logging.getLogger('src')

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'


def get_log_directory():
    """Directory holding application.log."""
    if os.name == 'nt':
        return os.path.join(os.getenv('APPDATA'), 'chaos-dd', 'logs')
    return os.path.join(Path.home(), '.cache', 'chaos-dd', 'logs')


def configure_logger(log_level='INFO', log_dir=None):
    """Send `src.*` records to application.log and stdout, replacing earlier handlers."""
    log_dir = log_dir or get_log_directory()
    os.makedirs(log_dir, exist_ok=True)
    log_file_path = os.path.join(log_dir, 'application.log')

    if logger.hasHandlers():
        logger.handlers.clear()
    level = log_level.upper()
    logger.setLevel(level)
    formatter = logging.Formatter(LOG_FORMAT)

    # UTF-8 so paths with non-ASCII characters survive on Windows
    file_handler = logging.FileHandler(log_file_path, encoding='utf-8')
    stream_handler = logging.StreamHandler(sys.stdout)
    for handler in (file_handler, stream_handler):
        handler.setLevel(level)
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    logger.debug("Logs are being saved to: [%s]", log_file_path)
    return log_file_path
