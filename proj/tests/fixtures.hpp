#pragma once

#include <string>
#include <vector>

namespace fixtures {

// Molecules with at most 7 heavy atoms.
inline const std::vector<std::string> kSmall = {
    "C",          "CC",         "CCO",          "C=C",        "C#N",        "CC(C)C",    "CC(=O)O",
    "OCCO",       "C1CC1",      "C1CCCCC1",     "c1ccccc1",   "c1ccncc1",   "c1cc[nH]c1", "c1ccoc1",
    "CC(=O)N",    "NC(=O)N",    "C1CC2CC12",    "OC(=O)C=O",  "C[N+](C)(C)C", "[NH4+]",   "FC(F)(F)Cl",
    "CS(=O)(=O)C", "OP(=O)(O)O", "C1=CC=CC=C1", "CC#CC",      "[13CH4]",    "C1CO1",      "c1ccsc1",
};

// Larger molecules: randomized permutations only.
inline const std::vector<std::string> kLarge = {
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "c1ccc2ccccc2c1",
    "C12CC3CC(C1)CC(C3)C2",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "O=C(O)CC(O)(CC(=O)O)C(=O)O",
    "c1ccc(cc1)-c1ccccc1",
    "CCN(CC)CCOC(=O)c1ccc(N)cc1",
    "C1CC2CCC1CC2",
    "OC1C(O)C(O)C(O)C(O)C1O",
    "c1ccc2c(c1)ccc1ccccc12",
    "CC1=C(C(=O)OC1)c1ccccc1",
};

}  // namespace fixtures
