"""BLS12-381 parameters and precomputed tower/curve constants.

Machine-generated from the curve seed; edit the generator script, not
this file.  The seed x is negative with |x| of Hamming weight 3, which
keeps the Miller loop and the membership-check scalar chains short.
"""

from gmpy2 import mpz

# seed x = -|x|; p and r are the standard base-field / subgroup orders
X_ABS = mpz(0xD201000000010000)
P = mpz(0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB)
R = mpz(0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001)

# cofactors: #E(Fp) = h1 * r; [1 - x] clears h1 for hash-to-curve outputs
H1_COFACTOR = mpz(0x396C8C005555E1568C00AAAB0000AAAB)
H_EFF = mpz(0xD201000000010001)

CURVE_B = mpz(4)
TWIST_B = (mpz(4), mpz(4))  # twist curve y^2 = x^3 + 4(u+1)

G1_GEN = (
    mpz(0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB),
    mpz(0x8B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1),
)
G2_GEN = (
    (mpz(0x24AA2B2F08F0A91260805272DC51051C6E47AD4FA403B02B4510B647AE3D1770BAC0326A805BBEFD48056C8C121BDB8),
     mpz(0x13E02B6052719F607DACD3A088274F65596BD0D09920B61AB5DA61BBDC7F5049334CF11213945D57E5AC7D055D042B7E)),
    (mpz(0xCE5D527727D6E118CC9CDC6DA2E351AADFD9BAA8CBDD3A76D429A695160D12C923AC9CC3BACA289E193548608B82801),
     mpz(0x606C4A02EA734CC32ACD2B02BC28B99CB3E287E85A763AF267492AB572E99AB3F370D275CEC1DA1AAA9075FF05F79BE)),
)

# gamma1[i] = xi^{i(p-1)/6} for the p-power Frobenius on the w-basis
FROB_GAMMA1 = (
    (mpz(0x1),
     mpz(0x0)),
    (mpz(0x1904D3BF02BB0667C231BEB4202C0D1F0FD603FD3CBD5F4F7B2443D784BAB9C4F67EA53D63E7813D8D0775ED92235FB8),
     mpz(0xFC3E2B36C4E03288E9E902231F9FB854A14787B6C7B36FEC0C8EC971F63C5F282D5AC14D6C7EC22CF78A126DDC4AF3)),
    (mpz(0x0),
     mpz(0x1A0111EA397FE699EC02408663D4DE85AA0D857D89759AD4897D29650FB85F9B409427EB4F49FFFD8BFD00000000AAAC)),
    (mpz(0x6AF0E0437FF400B6831E36D6BD17FFE48395DABC2D3435E77F76E17009241C5EE67992F72EC05F4C81084FBEDE3CC09),
     mpz(0x6AF0E0437FF400B6831E36D6BD17FFE48395DABC2D3435E77F76E17009241C5EE67992F72EC05F4C81084FBEDE3CC09)),
    (mpz(0x1A0111EA397FE699EC02408663D4DE85AA0D857D89759AD4897D29650FB85F9B409427EB4F49FFFD8BFD00000000AAAD),
     mpz(0x0)),
    (mpz(0x5B2CFD9013A5FD8DF47FA6B48B1E045F39816240C0B8FEE8BEADF4D8E9C0566C63A3E6E257F87329B18FAE980078116),
     mpz(0x144E4211384586C16BD3AD4AFA99CC9170DF3560E77982D0DB45F3536814F0BD5871C1908BD478CD1EE605167FF82995)),
)

# gamma2[i] = xi^{i(p^2-1)/6}; all lie in Fp
FROB_GAMMA2 = (
    mpz(0x1),
    mpz(0x5F19672FDF76CE51BA69C6076A0F77EADDB3A93BE6F89688DE17D813620A00022E01FFFFFFFEFFFF),
    mpz(0x5F19672FDF76CE51BA69C6076A0F77EADDB3A93BE6F89688DE17D813620A00022E01FFFFFFFEFFFE),
    mpz(0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAA),
    mpz(0x1A0111EA397FE699EC02408663D4DE85AA0D857D89759AD4897D29650FB85F9B409427EB4F49FFFD8BFD00000000AAAC),
    mpz(0x1A0111EA397FE699EC02408663D4DE85AA0D857D89759AD4897D29650FB85F9B409427EB4F49FFFD8BFD00000000AAAD),
)

# Shallue-van de Woestijne map constants for g(x) = x^3 + 4, Z = 4:
# c1 = g(Z), c2 = -Z/2, c3 = sqrt(-g(Z)(3Z^2)) with even parity,
# c4 = -4 g(Z) / (3 Z^2)
SVDW_Z = mpz(4)
SVDW_C1 = mpz(0x44)
SVDW_C2 = mpz(0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAA9)
SVDW_C3 = mpz(0xC1444B24657B9F63B8A16FAA151E0DC841225A02D9E2819B589ABD0A759CEAAF4A4B5766D6894109BCECDDB3FC9A780)
SVDW_C4 = mpz(0x11560BF17BAA99BC32126FCED787C88F984F87ADF7AE0C7F9A208C6B4F20A4181472AAA9CB8D555526A9FFFFFFFFC717)
