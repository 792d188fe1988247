"""Exception types raised across the package."""


class TFTError(Exception):
    """Base class; ``code`` is the short name used in CLI error output."""

    code = "error"


def _mk(name, code):
    return type(name, (TFTError,), {"code": code})


CompositionError = _mk("CompositionError", "composition")
PartitionError = _mk("PartitionError", "partition")
ParseError = _mk("ParseError", "parse")
ElementError = _mk("ElementError", "element")
NotInGroupError = _mk("NotInGroupError", "not_in_group")
IntervalError = _mk("IntervalError", "interval")
DyadicError = _mk("DyadicError", "dyadic")
NotDiffeoError = _mk("NotDiffeoError", "not_diffeo")
ShapeError = _mk("ShapeError", "shape")
DegeneracyError = _mk("DegeneracyError", "degeneracy")
DegenerateBlobError = _mk("DegenerateBlobError", "degenerate_blob")
ForestError = _mk("ForestError", "forest")
VacuumError = _mk("VacuumError", "vacuum")
RefinementError = _mk("RefinementError", "refinement")
ResourceError = _mk("ResourceError", "resource")
SupportError = _mk("SupportError", "support")
SingularEigenvalueError = _mk("SingularEigenvalueError", "singular_eigenvalue")
IrreducibleError = _mk("IrreducibleError", "irreducible")
GramError = _mk("GramError", "gram")
ParameterError = _mk("ParameterError", "parameter")
