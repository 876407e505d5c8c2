"""Exception hierarchy shared by the solvers and the command line."""


class NashWelfareError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(NashWelfareError, ValueError):
    """The instance document or matrix is not a valid fair-division instance."""


class MalformedDocumentError(InstanceError):
    pass


class DimensionMismatchError(InstanceError):
    pass


class NegativeEntryError(InstanceError):
    pass


class ProfileError(InstanceError):
    """A concave cardinality profile violates its invariants or sizes."""


class AllocationError(NashWelfareError, ValueError):
    """An allocation is not an n-partition of the goods."""


class UnallocatedGoodError(AllocationError):
    pass


class DoublyAllocatedGoodError(AllocationError):
    pass


class ViewInconsistencyError(AllocationError):
    pass


class NotIdenticalError(NashWelfareError, ValueError):
    pass


class NotBinaryError(NashWelfareError, ValueError):
    pass


class InfeasibleError(NashWelfareError):
    """No allocation gives every agent a positively valued good.

    ``agents`` holds the 0-indexed agents left without a valued good by a
    maximum matching.
    """

    def __init__(self, agents):
        self.agents = tuple(agents)
        shown = ", ".join(str(a + 1) for a in self.agents)
        super().__init__(f"instance is infeasible: agents {{{shown}}} cannot all receive a valued good")


class NotReachableError(NashWelfareError):
    pass


class StaleChainError(NashWelfareError):
    pass


class CapExhaustedError(NashWelfareError):
    """The binary solver hit its iteration cap while still improving.

    This should be unreachable; the partial result is attached for diagnosis.
    """

    def __init__(self, cap, allocation, trace):
        self.cap = cap
        self.allocation = allocation
        self.trace = trace
        super().__init__(f"iteration cap {cap} exhausted before reaching a local optimum")


class BudgetExceededError(NashWelfareError):
    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} assignments, budget is {budget}")
