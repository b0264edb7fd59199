# package src.sync
from src.sync.broadcast import BroadcastSynchronizer
from src.sync.cogsworth import CogsworthSynchronizer
from src.sync.doubling import DoublingSynchronizer

SYNCHRONIZERS = {
    DoublingSynchronizer.name: DoublingSynchronizer,
    BroadcastSynchronizer.name: BroadcastSynchronizer,
    CogsworthSynchronizer.name: CogsworthSynchronizer,
}

__all__ = ['BroadcastSynchronizer', 'CogsworthSynchronizer', 'DoublingSynchronizer', 'SYNCHRONIZERS']
