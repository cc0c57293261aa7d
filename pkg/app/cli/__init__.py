# cli package: command-line front end
