from pathlib import Path
from typing import Optional, Union


class BeliefBenchError(Exception):
    """Base class for exceptions in this package."""
    pass


class InputError(BeliefBenchError):
    """Fatal problem with user-provided input (repository, manifest, config)."""
    pass


class ParseError(BeliefBenchError):
    """
    Raised for malformed extract or summary files.

    Attributes:
        path -- file that could not be parsed
        line_number -- 1-based line of the offending record, None if the
                       file format is not line based
    """

    def __init__(self,
                 msg: str,
                 path: Optional[Union[str, Path]]=None,
                 line_number: Optional[int]=None):
        self.path = path
        self.line_number = line_number
        where = ""
        if path is not None:
            where = str(path)
            if line_number is not None:
                where += ":%d" % line_number
            where += ": "
        super().__init__(where + msg)


class AcquisitionError(BeliefBenchError):
    """A single project could not be cloned; the corpus run continues."""
    pass


class GenerationError(BeliefBenchError):
    """A synthetic history spec cannot be satisfied."""
    pass
