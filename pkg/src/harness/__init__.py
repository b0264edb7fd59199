# package src.harness
