from autostack.automata.dfa import AutomatonError, Dfa, Nfa
from autostack.automata.padded import SyncRelation, pad_tuple, unpad
from autostack.automata.asynchronous import AsyncAutomaton, async_run, async_project_first

__all__ = [
    "AutomatonError",
    "Dfa",
    "Nfa",
    "SyncRelation",
    "pad_tuple",
    "unpad",
    "AsyncAutomaton",
    "async_run",
    "async_project_first",
]
