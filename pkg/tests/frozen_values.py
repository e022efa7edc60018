"""Reference values written by scripts/freeze_oracles.py; do not edit by hand."""

FROZEN = {
    'E1_1': (0.21938393439552023+0j),
    'E1_(0.5+2j)': (-0.23812693789267184-0.025877115590053887j),
    'E1_(3-4j)': (0.000863953958979586-0.008786208377197444j),
    'E1_(0.01+0.02j)': (3.2333099544943704-1.0872488264115452j),
    'E1_(25+1j)': (2.712407882752899e-13-4.605538196966275e-13j),
    'E1_10j': (0.04545643300445537+0.08755126742397742j),
    'E1_(-3+0.1j)': (-9.911527702872467-2.472694452871406j),
    'E1_(-3-0.1j)': (-9.911527702872467+2.472694452871406j),
    'E1_(60+80j)': (6.296992669277777e-29+6.008658192331212e-29j),
    'erfc_1': (0.15729920705028522+0j),
    'erfc_(1+1j)': (-0.3161512816979477-0.1904534692378347j),
    'theta3_0_0.1': (1.2002000019999999+0j),
    'theta3_(0.3+0.2j)_0.4': (1.7383937591939977-0.22869541528528897j),
    'theta2_(0.3+0.2j)_0.4': (1.7382063008303403-0.22923086542773574j),
    'theta3_1.1_0.95': (4.45258730669556e-10+0j),
    'lerch_abel_0.3_1.5': (0.46216266165625197+0.1998343687425576j),
    'lerch_mp_0.3_1.5': (0.46216266165625053+0.19983436874255822j),
    'lerch_s2_0.5j_0.7': (2.009048390920972+0.1647274330158268j),
    'lerch_ds0_0.2_1.7': (0.08967669412394094-0.4680791770829695j),
    'lerch1_3.427785+2.887183j_0.2': (3.7120364505161536+1.6470594600233943j),
    'lerch1_-4.028052-8.801454j_0.8': (0.3110753620307316-0.22532018489599384j),
    'lerch1_-3.000000+0.500000j_1.3': (0.3180758954444076+0.027554604800395253j),
    'G_1_2.4': (-1.9412161901167766+1.4106846055019366j),
    's1_0.25_0.2': (1.244949142441441+0.0427050983124842j),
    's2_2.4_0.25_0.2': (-1.0888880400351875-0.041903527753672946j),
    's3_2.4_0.25_0.2': (-10.726540489497474+1.0240237636717509j),
    'S+_2.4_0.25_0.2': (-10.570479387091261+1.0248253342305622j),
    'S+_2.4_-0.25_0.2': (-10.5704793870913-1.024825334230513j),
    'S0_2.4_0.25': (-1.154960425177629+1.5079644737230757j),
    'S+_cplx_0.25_0.2': (-8.233188741348995+0.5214011283323872j),
    'S0_cplx_0.25': (-8.694981500706598+4.096849228197704j),
    'bands1d_0.2_0.25_plus': (2.4709648721857724-0.4024330440166751j),
    'bands1d_0.2_0.25_minus': (2.320172161375908-0.39770980351923874j),
    'bands1d_asym_plus': (2.4512626736479923-0.2800864998623901j),
    'bands1d_asym_minus': (2.396716268497849-0.6039425287969253j),
    'S2d+_2.4_0.2_0.1': (-3.765842832248013+6.9956469635040985j),
    'S2d0_2.4_0.2_0.1': (-9.144728233658624+0.19036274385562002j),
    'S2d-_2.4_0.2_0.1': (-7.816965062043867-1.419755569559033j),
}
