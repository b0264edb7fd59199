# package src.commands
