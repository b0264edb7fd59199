# package src.utility