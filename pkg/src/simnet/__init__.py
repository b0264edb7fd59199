# package src.simnet
from src.simnet.adversary import AdversarySpec, ScriptedSend, byzantine_tc_amplify, parse_adversary
from src.simnet.delays import AdversaryChosenDelay, DelayPolicy, UniformRandomDelay, WorstCaseDelay
from src.simnet.simulator import Simulator, run
from src.simnet.trace import RecordKind, Trace, TraceMeta, TraceRecord

__all__ = [
    'AdversaryChosenDelay', 'AdversarySpec', 'DelayPolicy', 'RecordKind', 'ScriptedSend', 'Simulator', 'Trace',
    'TraceMeta', 'TraceRecord', 'UniformRandomDelay', 'WorstCaseDelay', 'byzantine_tc_amplify', 'parse_adversary',
    'run',
]
