"""Exception hierarchy.

Everything raised on purpose derives from :class:`PhonoNetError`, which the
CLI maps to exit status 1.
"""


class PhonoNetError(Exception):
    """Base class for data and model errors."""


class UntokenizableInput(PhonoNetError, ValueError):
    pass


class EmptyAfterStripping(PhonoNetError, ValueError):
    pass


class EmptyLexicon(PhonoNetError, ValueError):
    pass


class DuplicateInsert(PhonoNetError, KeyError):
    pass


class MissingRemove(PhonoNetError, KeyError):
    pass


class DegenerateVariance(PhonoNetError, ArithmeticError):
    """Assortativity is undefined when every edge end has the same degree."""


class DisconnectedScope(PhonoNetError, ValueError):
    pass


class NoInterLayerLinks(PhonoNetError, ArithmeticError):
    pass


class StuckChain(PhonoNetError, RuntimeError):
    """The phoneme chain hit a phoneme without outgoing transitions."""


class LayerExhausted(PhonoNetError, RuntimeError):
    pass


class SlotStarvation(PhonoNetError, RuntimeError):
    pass


class Unbracketable(PhonoNetError, ValueError):
    pass


class NotConverged(PhonoNetError, RuntimeError):
    pass


class MissingSeries(PhonoNetError, KeyError):
    pass
