import logging


class setuplog(object):
    """Named loggers of pmlpy.

    :param filename: Optional log file, attached to the ``Verify`` logger the
        first time it is configured
    """
    def __init__(self, filename=None):
        self.filename = filename
        formatter = logging.Formatter('%(asctime)s [%(name)s] %(levelname)s: %(message)s')
        ch = logging.StreamHandler()
        ch.setFormatter(formatter)
        self.Leakagelog = self._logger('Leakage', ch)
        self.Equivlog = self._logger('Equiv', ch)
        self.Constructlog = self._logger('Construct', ch)
        self.Mechlog = self._logger('Mech', ch)
        self.Verifylog = logging.getLogger('Verify')
        if not self.Verifylog.handlers:
            self.Verifylog.setLevel(logging.INFO)
            self.Verifylog.addHandler(ch)
            if filename is not None:
                fh = logging.FileHandler(filename)
                fh.setFormatter(formatter)
                self.Verifylog.addHandler(fh)

    @staticmethod
    def _logger(name, handler):
        logger = logging.getLogger(name)
        if not logger.handlers:
            logger.setLevel(logging.INFO)
            logger.addHandler(handler)
        return logger


if __name__ == '__main__':
    logger = setuplog()
    logger.Leakagelog.info('print')
