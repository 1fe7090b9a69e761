/* planted: pending is written under pending_lock in 6 of 7 places; the last write is bare */

void set_1(struct ctl *c)
{
	spin_lock(&pending_lock);
	pending = 1;
	spin_unlock(&pending_lock);
}

void set_2(struct ctl *c)
{
	spin_lock(&pending_lock);
	pending = 2;
	spin_unlock(&pending_lock);
}

void set_3(struct ctl *c)
{
	spin_lock(&pending_lock);
	pending = 3;
	spin_unlock(&pending_lock);
}

void set_4(struct ctl *c)
{
	spin_lock(&pending_lock);
	pending = 4;
	spin_unlock(&pending_lock);
}

void set_5(struct ctl *c)
{
	spin_lock(&pending_lock);
	pending = 5;
	spin_unlock(&pending_lock);
}

void set_6(struct ctl *c)
{
	spin_lock(&pending_lock);
	pending = 6;
	spin_unlock(&pending_lock);
}

void set_7(struct ctl *c)
{
	pending = 7;
}
