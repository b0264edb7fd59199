# package src

