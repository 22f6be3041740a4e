''' Exception types raised by the library.
'''


class GeometryError(ValueError):
    ''' Invalid or degenerate curve geometry. '''


class CollisionError(GeometryError):
    ''' Two quadrature nodes nearly coincide away from the diagonal. '''


class ParameterError(ValueError):
    ''' A numeric parameter is outside of its domain. '''


class ConstraintError(ValueError):
    ''' A support function violates its radius-of-curvature bound. '''


class ProjectionError(RuntimeError):
    ''' The convex projection did not converge. '''


class PreconditionError(ValueError):
    ''' An operation precondition is violated by its inputs. '''


class UndefinedPointError(ValueError):
    ''' Evaluation requested at a corner or kink. '''


class InsufficientDataError(ValueError):
    ''' Too few valid samples for a fit. '''


class UnsupportedDomainError(ValueError):
    ''' The operation is not defined on this function domain. '''
