from pmlpy.prob import Pmf, Channel, Joint, AlphabetError
from pmlpy.leakage import pml, pml_profile, leakage_capacity
