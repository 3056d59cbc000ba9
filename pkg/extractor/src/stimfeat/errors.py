class StimfeatError(Exception):
    pass


class CheckpointLoadError(StimfeatError):
    pass


class EmptySentence(StimfeatError):
    pass


class InvalidWindowing(StimfeatError):
    pass


class InvalidTimes(StimfeatError):
    pass


class IoError(StimfeatError):
    pass
