# core package for shared types, errors, seeding and config
