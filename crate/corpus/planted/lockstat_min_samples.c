/* planted: flags is written under flags_lock in 4 of 5 places; the last write is bare */

void set_1(struct ctl *c)
{
	mutex_lock(&flags_lock);
	flags = 1;
	mutex_unlock(&flags_lock);
}

void set_2(struct ctl *c)
{
	mutex_lock(&flags_lock);
	flags = 2;
	mutex_unlock(&flags_lock);
}

void set_3(struct ctl *c)
{
	mutex_lock(&flags_lock);
	flags = 3;
	mutex_unlock(&flags_lock);
}

void set_4(struct ctl *c)
{
	mutex_lock(&flags_lock);
	flags = 4;
	mutex_unlock(&flags_lock);
}

void set_5(struct ctl *c)
{
	flags = 5;
}
