"""Runtime configuration built from ``settings.GIRTH`` plus CLI overrides."""
import math
from dataclasses import dataclass, field, replace

from django.conf import settings

from graphs.exceptions import BadParameter


def log2_squared(m):
    return math.log2(m) ** 2 if m >= 2 else 0.0


@dataclass(frozen=True)
class EllPolicy:
    """Leaf size policy: ``paper``, ``scaled`` (multiplier ``value``) or ``fixed`` (``value`` nodes)."""

    mode: str = 'scaled'
    value: int = 1

    MODES = ('paper', 'scaled', 'fixed')

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise BadParameter(f'Unknown ell policy {self.mode!r}.')
        if self.mode == 'fixed' and self.value < 2:
            raise BadParameter(f'fixed ell needs k >= 2, got {self.value}.')
        if self.mode == 'scaled' and self.value < 1:
            raise BadParameter(f'scaled ell needs c >= 1, got {self.value}.')

    @classmethod
    def parse(cls, text, scale=1):
        text = str(text).strip()
        if text in ('paper', 'scaled'):
            return cls(text, scale if text == 'scaled' else 1)
        if text.startswith('scaled:') or text.startswith('fixed:'):
            mode, _, raw = text.partition(':')
            try:
                return cls(mode, int(raw))
            except ValueError:
                raise BadParameter(f'Malformed ell policy {text!r}.') from None
        raise BadParameter(f'Malformed ell policy {text!r}; use paper, scaled or fixed:<k>.')

    def ell(self, m):
        if self.mode == 'fixed':
            return self.value
        if m < 2:
            return 2
        if self.mode == 'paper':
            return max(2, math.ceil(math.log2(m) ** 30))
        return max(8, math.ceil(self.value * log2_squared(m)))

    def special_threshold(self, m):
        """Border-plus-radius size under which a leaf gets an inner dissection.

        ``paper`` keeps ceil(log^2 ell(m)); the practical policies use
        ceil(log ell(m)).
        """
        ell = self.ell(m)
        if self.mode == 'paper':
            return max(4, math.ceil(log2_squared(ell)))
        return max(4, math.ceil(math.log2(ell)))

    def __str__(self):
        if self.mode == 'paper':
            return 'paper'
        if self.mode == 'scaled' and self.value == 1:
            return 'scaled'
        return f'{self.mode}:{self.value}'


@dataclass(frozen=True)
class GirthConfig:
    ell: EllPolicy = field(default_factory=EllPolicy)
    lookup_mode: str = 'lazy'
    lookup_cache: str = None
    lookup_max_nodes: int = 16
    threads: int = 1
    seed: int = 0
    witness: bool = False
    oracle: bool = False
    cross_check: bool = False

    def __post_init__(self):
        if self.lookup_mode not in ('lazy', 'eager'):
            raise BadParameter(f'Unknown lookup mode {self.lookup_mode!r}.')
        if self.threads < 1:
            raise BadParameter(f'threads must be positive, got {self.threads}.')

    @classmethod
    def from_settings(cls, **overrides):
        conf = getattr(settings, 'GIRTH', {})
        base = cls(
            ell=EllPolicy.parse(conf.get('ELL_POLICY', 'scaled'), conf.get('ELL_SCALE', 1)),
            lookup_mode=conf.get('LOOKUP_MODE', 'lazy'),
            lookup_cache=conf.get('LOOKUP_CACHE'),
            lookup_max_nodes=int(conf.get('LOOKUP_MAX_NODES', 16)),
            threads=int(conf.get('THREADS', 1)),
            seed=int(conf.get('SEED', 0)),
            witness=bool(conf.get('WITNESS', False)),
        )
        return base.with_overrides(**overrides)

    def with_overrides(self, **overrides):
        changes = {key: value for key, value in overrides.items() if value is not None}
        if isinstance(changes.get('ell'), str):
            changes['ell'] = EllPolicy.parse(changes['ell'])
        return replace(self, **changes)
