import logging

_RESERVED = set(vars(logging.LogRecord('', 0, '', 0, '', (), None))) | {'message', 'asctime'}


class KeyValueFormatter(logging.Formatter):
    """Appends ``key=value`` for every ``extra`` passed to the logging call."""

    def format(self, record):
        line = super().format(record)
        extras = {k: v for k, v in vars(record).items() if k not in _RESERVED}
        if extras:
            line += ' ' + ' '.join(f'{k}={v}' for k, v in sorted(extras.items()))
        return line
