# bounds package: closed-form BER bound calculus
