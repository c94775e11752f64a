# -*- coding: utf-8 -*-

__version__ = "0.1.0"


from . import (
    counting,
    data,
    distributions,
    fock,
    spacetime,
    states,
    visualisation,
)
